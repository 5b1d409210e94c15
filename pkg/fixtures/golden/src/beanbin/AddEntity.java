package beanbin;

public class AddEntity implements Command {
    private final Object entity;

    public AddEntity(Object entity) {
        this.entity = entity;
    }

    public void execute(BeanBinDAO dao) {
        dao.add(entity);
    }
}

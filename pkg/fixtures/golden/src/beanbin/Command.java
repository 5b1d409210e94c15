package beanbin;

public interface Command {
    void execute(BeanBinDAO dao);
}

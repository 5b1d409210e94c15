package beanbin;

public class Query {
    private final Criteria criteria;

    public Query(Criteria criteria) {
        this.criteria = criteria;
    }

    public boolean matches(Object entity) {
        return criteria.matches(entity.toString());
    }
}

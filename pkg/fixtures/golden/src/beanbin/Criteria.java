package beanbin;

public class Criteria {
    private final String property;
    private final Object value;
    private final SearchType searchType;

    public Criteria(String property, Object value, SearchType searchType) {
        this.property = property;
        this.value = value;
        this.searchType = searchType;
    }

    public boolean matches(Object propertyValue) {
        return value.equals(propertyValue);
    }

    public String getProperty() {
        return property;
    }
}

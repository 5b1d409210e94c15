package beanbin;

public enum SearchType {
    EQUALS,
    LIKE
}

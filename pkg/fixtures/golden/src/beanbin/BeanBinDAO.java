package beanbin;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class BeanBinDAO {
    private final Map<Class<?>, List<Object>> store;

    public BeanBinDAO() {
        this.store = new HashMap<>();
    }

    public void add(Object entity) {
        store.computeIfAbsent(entity.getClass(), k -> new ArrayList<>()).add(entity);
    }

    public List<Object> search(Class<?> type, Query query) {
        List<Object> results = new ArrayList<>();
        for (Object candidate : store.getOrDefault(type, new ArrayList<>())) {
            if (query.matches(candidate)) {
                results.add(candidate);
            }
        }
        return results;
    }
}

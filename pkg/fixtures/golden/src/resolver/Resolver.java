package resolver;

import java.util.ArrayList;
import java.util.List;

public class Resolver {
    private final List<Class<?>> classes = new ArrayList<>();

    public Resolver() {
        classes.add(ImplOne.class);
        classes.add(ImplTwo.class);
    }

    public List<Class> findImplementations(Class<?> base) {
        List<Class> found = new ArrayList<>();
        for (Class<?> candidate : classes) {
            if (base.isAssignableFrom(candidate) && !candidate.equals(base)) {
                found.add(candidate);
            }
        }
        return found;
    }
}

package entityutils;

import java.lang.reflect.Method;
import java.util.HashMap;
import java.util.Map;

public final class EntityUtils {
    private static final Map<Method, Method> SETTERS = new HashMap<>();

    private EntityUtils() {
    }

    public static Method getMethod(Class<?> type, String property) throws NoSuchMethodException {
        return type.getMethod("get" + capitalize(property));
    }

    public static Method getSetter(Method getter) {
        return SETTERS.get(getter);
    }

    public static void register(Method getter, Method setter) {
        SETTERS.put(getter, setter);
    }

    private static String capitalize(String property) {
        return Character.toUpperCase(property.charAt(0)) + property.substring(1);
    }
}

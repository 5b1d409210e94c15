package resolver;

import static org.junit.Assert.*;

import java.util.List;

import org.junit.Test;

public class ResolverTest {

    @Test
    public void testFindImplementations() throws Exception {
        Resolver resolve = new Resolver();
        List<Class> list = resolve.findImplementations(Base.class);
        assertTrue(list.contains(ImplOne.class));
        assertTrue(list.contains(ImplTwo.class));
        assertEquals(2, list.size());
        }
}

package category;

import static org.junit.Assert.*;

import org.junit.Test;

public class CategoryTest {

    @Test
    public void testEquals() throws Exception {
        Category a = new Category();
        a.setName("giraffes");

        Category b = new Category();
        b.setName("camels");

        Category c = new Category("giraffes");

        assertEquals(a, c);
        assertEquals(c, a);
        assertTrue(!a.equals(b));
        assertTrue(!b.equals(c));
        assertTrue(!b.equals(null));
        assertTrue(!b.equals(new Object()));
    }
}

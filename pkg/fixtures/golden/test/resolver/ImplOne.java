package resolver;

public class ImplOne implements Base {
}

package resolver;

public class ImplTwo implements Base {
}

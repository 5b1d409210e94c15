package resolver;

public interface Base {
}

package photo;

public interface ViewFactory {
}

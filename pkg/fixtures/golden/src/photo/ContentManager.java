package photo;

public interface ContentManager {
}

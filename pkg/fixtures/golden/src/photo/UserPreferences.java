package photo;

public interface UserPreferences {
}

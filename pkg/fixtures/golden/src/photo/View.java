package photo;

public interface View {
}

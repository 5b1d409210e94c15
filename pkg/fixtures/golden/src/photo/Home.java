package photo;

public class Home {
    private float wallHeight;

    public Home() {
        this.wallHeight = 250f;
    }

    public float getWallHeight() {
        return wallHeight;
    }
}

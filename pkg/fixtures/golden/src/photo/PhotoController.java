package photo;

public class PhotoController {
    private final Home home;
    private final UserPreferences preferences;
    private final View view;
    private final ViewFactory viewFactory;
    private final ContentManager contentManager;
    private long time;

    public PhotoController(Home home, UserPreferences preferences, View view,
                           ViewFactory viewFactory, ContentManager contentManager) {
        this.home = home;
        this.preferences = preferences;
        this.view = view;
        this.viewFactory = viewFactory;
        this.contentManager = contentManager;
    }

    public long getTime() {
        return time;
    }

    public void setTime(long time) {
        this.time = time;
    }
}

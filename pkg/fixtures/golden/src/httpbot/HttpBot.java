package httpbot;

import java.net.URL;

public class HttpBot {
    private URL url;

    public HttpBot(String url) throws Exception {
        this.url = new URL(url);
    }

    public HttpBot(URL url) {
        this.url = url;
    }

    public URL getUrl() {
        return url;
    }
}

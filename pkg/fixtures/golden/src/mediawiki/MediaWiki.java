package mediawiki;

public final class MediaWiki {

    private MediaWiki() {
    }

    public static String decode(String s) {
        return s.replace("&#039;", "'").replace("&quot;", "\"").replace("&amp;", "&");
    }
}

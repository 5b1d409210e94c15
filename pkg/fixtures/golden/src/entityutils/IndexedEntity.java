package entityutils;

public class IndexedEntity {
    private String keywords;
    private String generatedKeywords;

    public String getKeywords() {
        return keywords;
    }

    public void setKeywords(String keywords) {
        this.keywords = keywords;
    }

    public String getGeneratedKeywords() {
        return generatedKeywords;
    }
}

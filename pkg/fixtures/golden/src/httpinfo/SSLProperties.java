package httpinfo;

public class SSLProperties {
    private String protocol;

    public SSLProperties() {
        this.protocol = "TLS";
    }

    public String getProtocol() {
        return protocol;
    }
}

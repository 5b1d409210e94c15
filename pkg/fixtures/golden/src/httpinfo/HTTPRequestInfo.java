package httpinfo;

import java.net.URI;

public class HTTPRequestInfo {
    private URI uri;
    private String proxyHost;
    private int proxyPort;
    private String proxyUser;
    private String proxyPassword;
    private SSLProperties sslProperties;

    public HTTPRequestInfo(URI uri, String proxyHost, int proxyPort, String proxyUser,
                           String proxyPassword, SSLProperties sslProperties) {
        this.uri = uri;
        this.proxyHost = proxyHost;
        this.proxyPort = proxyPort;
        this.proxyUser = proxyUser;
        this.proxyPassword = proxyPassword;
        this.sslProperties = sslProperties;
    }

    public URI getURI() {
        return uri;
    }

    public String getProxyHost() {
        return proxyHost;
    }

    public int getProxyPort() {
        return proxyPort;
    }

    public String getProxyUser() {
        return proxyUser;
    }

    public String getProxyPassword() {
        return proxyPassword;
    }

    public SSLProperties getSSLProperties() {
        return sslProperties;
    }
}

package jdbc;

import java.sql.Connection;
import java.sql.DriverManager;

public class JdbcConnectionSource {
    private String url;
    private String username;
    private String password;
    private boolean closed;

    public JdbcConnectionSource(String url) {
        this.url = url;
    }

    public void setUsername(String username) {
        this.username = username;
    }

    public void setPassword(String password) {
        this.password = password;
    }

    public Connection getReadOnlyConnection(String tableName) throws Exception {
        return DriverManager.getConnection(url, username, password);
    }

    public void close() {
        this.closed = true;
    }
}

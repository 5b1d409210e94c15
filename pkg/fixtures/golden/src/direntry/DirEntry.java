package direntry;

public class DirEntry {
    private String name;
    private long size;

    public DirEntry() {
        this.name = "";
        this.size = 0L;
    }

    public void setSize(long size) {
        this.size = size;
    }

    public long getSize() {
        return size;
    }

    public String getName() {
        return name;
    }

    @Override
    public boolean equals(Object o) {
        if (!(o instanceof DirEntry)) {
            return false;
        }
        DirEntry other = (DirEntry) o;
        return this.size == other.size && this.name.equals(other.name);
    }
}

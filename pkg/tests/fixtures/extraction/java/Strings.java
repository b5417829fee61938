package text;

/** Helpers for quoting strings. */
public class Strings {
    static final String OPEN = "/** fake doc */ class Fake {}";
    static final char SLASH = '/';
    static final String BLOCK = """
        /** still inside a text block */
        class AlsoFake {}
        """;

    /**
     * Builder nested in Strings.
     */
    public static class Builder {
        private final StringBuilder sb = new StringBuilder("}{");
    }
}

class Undocumented {
}

package nest;

/**
 * The outer type.
 */
public class Outer {
    /**
     * A nested interface.
     */
    interface Visitor {
        void visit(Outer o);
    }

    /** Colors used by {@code Outer}. */
    enum Color { RED, GREEN }

    /**
     * Inner class, two levels down.
     */
    class Inner {
        /** Deepest class. */
        class Deepest {}
    }

    void run() {
        Object o = new Object() {
            /** Anonymous body, not a declaration. */
            public String toString() { return "x"; }
        };
        Class<?> k = Outer.class;
    }
}

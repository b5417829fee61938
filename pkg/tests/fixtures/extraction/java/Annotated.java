package bank;

/**
 * Immutable value holder.
 * Use {@link #of(int)} to build one.
 */
@Deprecated
@SuppressWarnings({"unchecked", "rawtypes"})
@Table(name = "holder", schema = "/** not a comment */")
public class Annotated {
    public static Annotated of(int v) { return new Annotated(); }
}

package bank;

/**
 * Marks audited types.
 */
@Retention(RetentionPolicy.RUNTIME)
public @interface Marker {
    String value() default "";
}

/* plain block comment, not Javadoc */
class Plain {}

/**
 * Separated from its class by a line comment.
 */
// TODO remove
class Separated {}

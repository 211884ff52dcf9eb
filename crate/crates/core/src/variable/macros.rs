/// Builds a [`Query`](crate::variable::Query) from names and copy indices.
///
/// ```
/// # use strata::query;
/// let q = query!["x", 1, "linear_velocity"];
/// assert_eq!(q.to_string(), "x, 1, linear_velocity");
/// ```
///
/// Panics if the first token is not a name.
#[macro_export]
macro_rules! query {
    ($($token:expr),+ $(,)?) => {
        $crate::variable::Query::new(vec![$($crate::variable::IntoToken::into_token($token)),+])
            .expect("a query starts with a name")
    };
}

/// Declares variables as local bindings named after the variables themselves.
///
/// Leaves take a scalar count or `Q` for a unit quaternion. Branches use `<<=`
/// with either a parenthesized list of parts or a single replicated part, and
/// parts may be written `count * var`. Every declaration uses `?`, so the
/// enclosing function must return a `Result` whose error converts from
/// [`VarError`](crate::variable::VarError).
///
/// ```
/// # use strata::variables;
/// # fn main() -> Result<(), strata::variable::VarError> {
/// let n = 30;
/// variables! {
///     position: 3;
///     orientation: Q;
///     rotor_speed: 1;
///     x <<= (position, orientation);
///     big_x <<= (n + 1) * x;
///     u <<= 4 * rotor_speed;
///     decision_variables <<= (big_x, n * u);
/// }
/// assert_eq!(decision_variables.build()?.size(), 31 * 7 + 30 * 4);
/// # Ok(())
/// # }
/// ```
#[macro_export]
macro_rules! variables {
    () => {};
    ($name:ident : Q ; $($rest:tt)*) => {
        let $name = $crate::variable::leaf(
            stringify!($name),
            $crate::variable::Kind::Quaternion,
        )?;
        $crate::variables!($($rest)*);
    };
    ($name:ident : $n:tt ; $($rest:tt)*) => {
        let $name = $crate::variable::leaf(
            stringify!($name),
            $crate::variable::Kind::of_size($n),
        )?;
        $crate::variables!($($rest)*);
    };
    ($name:ident <<= ( $($parts:tt)* ) ; $($rest:tt)*) => {
        let $name = $crate::variable::bind(
            stringify!($name),
            $crate::variable::concat($crate::variables!(@parts [] $($parts)*))?,
        )?;
        $crate::variables!($($rest)*);
    };
    ($name:ident <<= $n:tt * $part:ident ; $($rest:tt)*) => {
        let $name = $crate::variable::bind(
            stringify!($name),
            $crate::variable::replicate($n, $part.clone())?,
        )?;
        $crate::variables!($($rest)*);
    };
    (@parts [$($acc:expr),*]) => {
        vec![$($acc),*]
    };
    (@parts [$($acc:expr),*] $n:tt * $part:ident $(, $($rest:tt)*)?) => {
        $crate::variables!(
            @parts [$($acc,)* $crate::variable::replicate($n, $part.clone())?] $($($rest)*)?
        )
    };
    (@parts [$($acc:expr),*] $part:ident $(, $($rest:tt)*)?) => {
        $crate::variables!(@parts [$($acc,)* $part.clone()] $($($rest)*)?)
    };
}

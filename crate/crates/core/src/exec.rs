//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] fans
//! work out over the rayon thread pool. Without it every call runs
//! sequentially. Results are always returned in input order.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Fallible map; the error reported is the one from the lowest failing index.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Execution::Sequential.map(&items, |x| x * x);
        let par = Execution::Parallel.map(&items, |x| x * x);
        assert_eq!(seq, par);
    }

    #[test]
    fn first_error_wins() {
        let items: Vec<i32> = (0..100).collect();
        let res: Result<Vec<i32>, i32> =
            Execution::Parallel.try_map(&items, |&x| if x % 30 == 29 { Err(x) } else { Ok(x) });
        assert_eq!(res, Err(29));
    }
}

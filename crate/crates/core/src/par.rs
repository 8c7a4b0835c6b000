//! Data-parallel helpers. With the `parallel` feature, work fans out over the
//! rayon pool; without it (or with `Parallelism::Sequential`) it runs in order
//! on the calling thread. Results always come back in input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }

    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Parallelism::Parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let xs: Vec<u64> = (0..500).collect();
        let a = Parallelism::Sequential.map(xs.clone(), |x| x * x);
        let b = Parallelism::Parallel.map(xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[499], 499 * 499);
    }
}

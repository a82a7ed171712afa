//! Data-parallel helpers. With the `parallel` feature the maps below run on
//! the rayon pool unless sequential mode is selected at runtime; results are
//! always returned in input order.

use std::sync::atomic::{AtomicU8, Ordering};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

const SEQ: u8 = 0;
const PAR: u8 = 1;

static MODE: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { PAR } else { SEQ });

pub fn set_mode(m: Mode) {
    MODE.store(if m == Mode::Parallel { PAR } else { SEQ }, Ordering::SeqCst);
}

/// The effective mode; always sequential without the `parallel` feature.
pub fn mode() -> Mode {
    if cfg!(feature = "parallel") && MODE.load(Ordering::SeqCst) == PAR {
        Mode::Parallel
    } else {
        Mode::Sequential
    }
}

/// Sizes the global pool. Only the first call can take effect.
pub fn configure_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("thread count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    if n == 1 {
        set_mode(Mode::Sequential);
    }
    Ok(())
}

pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode() == Mode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

pub fn map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode() == Mode::Parallel {
            use rayon::prelude::*;
            return (lo..hi).into_par_iter().map(f).collect();
        }
    }
    (lo..hi).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let v: Vec<u64> = (0..500).collect();
        let a = map_slice(&v, |x| x * x);
        let b = map_range(0, 500, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[499], 499 * 499);
    }
}

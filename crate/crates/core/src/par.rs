//! Trial-parallel execution.
//!
//! Work is indexed by trial number and results are always returned in trial
//! order, so every reduction downstream is independent of scheduling and of
//! the number of worker threads. Without the `parallel` feature everything
//! runs on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(t)` for `t in 0..trials`, results in trial order.
pub fn map_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(trials, f)
    }
}

/// Sequential reference path, always available.
pub fn map_trials_sequential<T, F>(trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..trials).map(f).collect()
}

/// Like [`map_trials`] but short-circuits on the first error (lowest trial
/// index wins when several fail).
pub fn try_map_trials<T, E, F>(trials: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    map_trials(trials, f).into_iter().collect()
}

/// Runs `op` on a pool with `workers` threads (0 = available parallelism).
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        op()
    }
}

/// Number of threads `map_trials` would use right now.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_trial_order_for_any_pool() {
        let a = with_workers(1, || map_trials(100, |t| t * t));
        let b = with_workers(4, || map_trials(100, |t| t * t));
        assert_eq!(a, b);
        assert_eq!(a, map_trials_sequential(100, |t| t * t));
    }

    #[test]
    fn try_map_reports_error() {
        let r: Result<Vec<u64>, u64> = try_map_trials(10, |t| if t == 7 { Err(t) } else { Ok(t) });
        assert_eq!(r, Err(7));
    }
}

use rayon::prelude::*;

/// Caps the worker count for sweeps and verification runs.
pub const THREADS_ENV: &str = "PILLAR_SIGHT_THREADS";

/// Worker cap from the environment; `None` when unset or unparsable.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Maps `f` over `items` in parallel, returning results in input order.
/// `threads` caps the pool size; `None` uses the global pool.
pub fn par_map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let run = || items.par_iter().map(&f).collect::<Vec<R>>();
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                run()
            }
        },
        None => run(),
    }
}

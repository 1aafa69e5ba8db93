/// Runs `f` inside a dedicated rayon pool of `threads` workers, or on the
/// global pool when `threads` is `None` or zero. Worker count never changes
/// results; callers reduce in a fixed order.
pub fn run_in_pool<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

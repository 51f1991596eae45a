//! Index-parallel helpers; sequential when the `parallel` feature is off.
//! Work items must draw randomness only from their own derived stream, which
//! keeps results identical under any schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn try_for_each_mut<T, E, F>(items: &mut [T], f: F) -> Result<(), E>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut T) -> Result<(), E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().try_for_each(|(i, t)| f(i, t))
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().try_for_each(|(i, t)| f(i, t))
    }
}

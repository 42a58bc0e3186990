//! Minimal pacing primitive: spaces calls to one backend at a fixed
//! interval. Waiters queue on the internal lock, so arrival order is
//! preserved and the first call goes through immediately.

use std::time::Duration;

use tokio::sync::Mutex;
use tokio::time::Instant;

pub struct RateLimiter {
    interval: Duration,
    next_free: Mutex<Instant>,
}

impl RateLimiter {
    pub fn per_minute(calls: u32) -> Self {
        let calls = calls.max(1);
        RateLimiter {
            interval: Duration::from_secs_f64(60.0 / calls as f64),
            next_free: Mutex::new(Instant::now()),
        }
    }

    #[cfg(test)]
    fn with_interval(interval: Duration) -> Self {
        RateLimiter {
            interval,
            next_free: Mutex::new(Instant::now()),
        }
    }

    /// Waits until this call's slot. Holding the lock across the sleep is
    /// intentional: it serializes waiters fairly instead of letting them
    /// stampede when a slot opens.
    pub async fn acquire(&self) {
        let mut next_free = self.next_free.lock().await;
        let now = Instant::now();
        if *next_free > now {
            tokio::time::sleep(*next_free - now).await;
        }
        *next_free = (*next_free).max(now) + self.interval;
    }
}

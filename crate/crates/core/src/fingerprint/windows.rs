use std::collections::VecDeque;

use super::{fingerprint, Record};
use crate::{Error, Result};

/// Head window, lag buffer and stable window of one state's records.
///
/// Every record enters the head window and the buffer; records leaving the
/// full buffer become stable. A drift flush empties buffer and stable window.
#[derive(Debug, Clone)]
pub struct BehaviourWindows {
    window: usize,
    buffer_len: usize,
    head: VecDeque<Record>,
    buffer: VecDeque<Record>,
    stable: VecDeque<Record>,
    stable_since_capture: usize,
}

impl BehaviourWindows {
    pub fn new(window: usize, buffer_ratio: f64) -> Self {
        let buffer_len = (window as f64 * buffer_ratio).round() as usize;
        Self {
            window,
            buffer_len,
            head: VecDeque::with_capacity(window + 1),
            buffer: VecDeque::with_capacity(buffer_len + 1),
            stable: VecDeque::with_capacity(window + 1),
            stable_since_capture: 0,
        }
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer_len
    }

    /// Adds a record; returns the record that became stable, if any.
    pub fn push(&mut self, record: Record) -> Option<&Record> {
        self.head.push_back(record.clone());
        if self.head.len() > self.window {
            self.head.pop_front();
        }
        self.buffer.push_back(record);
        if self.buffer.len() > self.buffer_len {
            let r = self.buffer.pop_front().expect("nonempty buffer");
            self.stable.push_back(r);
            self.stable_since_capture += 1;
            if self.stable.len() > self.window {
                self.stable.pop_front();
            }
            return self.stable.back();
        }
        None
    }

    pub fn flush(&mut self) {
        self.buffer.clear();
        self.stable.clear();
        self.stable_since_capture = 0;
    }

    pub fn head(&self) -> &VecDeque<Record> {
        &self.head
    }

    pub fn stable(&self) -> &VecDeque<Record> {
        &self.stable
    }

    pub fn stable_since_capture(&self) -> usize {
        self.stable_since_capture
    }

    /// Fingerprint of the stable window.
    pub fn capture(&mut self, min_window: usize) -> Result<Vec<f64>> {
        if self.stable.len() < min_window {
            return Err(Error::InsufficientData {
                needed: min_window,
                have: self.stable.len(),
            });
        }
        self.stable_since_capture = 0;
        let records: Vec<Record> = self.stable.iter().cloned().collect();
        fingerprint(&records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(i: usize) -> Record {
        Record::new(vec![i as f64], i % 2, 0)
    }

    #[test]
    fn buffer_lag_is_twenty() {
        let mut w = BehaviourWindows::new(100, 0.2);
        assert_eq!(w.buffer_len(), 20);
        for i in 0..20 {
            assert!(w.push(rec(i)).is_none());
        }
        let stable = w.push(rec(20)).cloned().unwrap();
        assert_eq!(stable.x[0], 0.0);
    }

    #[test]
    fn flush_and_min_window() {
        let mut w = BehaviourWindows::new(100, 0.2);
        for i in 0..84 {
            w.push(rec(i));
        }
        assert_eq!(w.stable().len(), 64);
        assert!(matches!(
            w.capture(65),
            Err(Error::InsufficientData { needed: 65, have: 64 })
        ));
        w.push(rec(84));
        assert_eq!(w.capture(65).unwrap().len(), 5 * 6);
        w.flush();
        assert_eq!(w.stable().len(), 0);
        assert_eq!(w.head().len(), 85);
    }

    #[test]
    fn windows_are_bounded() {
        let mut w = BehaviourWindows::new(100, 0.2);
        for i in 0..1000 {
            w.push(rec(i));
        }
        assert_eq!(w.head().len(), 100);
        assert_eq!(w.stable().len(), 100);
        assert_eq!(w.stable().back().unwrap().x[0], 979.0);
    }
}

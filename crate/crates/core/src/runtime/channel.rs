//! In-memory point-to-point channels and the shared registry.
//!
//! A channel is a pair of bounded FIFO queues, one per direction. Each of the
//! two participants holds an [`Endpoint`] naming its side; data values and
//! selection labels travel on the same queues, tagged by [`Message`].

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, Receiver, RecvTimeoutError, SendTimeoutError, Sender};

use super::{RtError, Value};

/// Buffered messages per direction before a send blocks.
pub const CAPACITY: usize = 16;

const POLL: Duration = Duration::from_millis(25);

#[derive(Debug, Clone)]
pub enum Message {
    Data(Value),
    Label { ty: String, case: String },
}

/// Point in time after which blocking operations give up.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(pub Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn after(d: Duration) -> Self {
        Deadline(Some(Instant::now() + d))
    }

    pub fn passed(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    fn slice(&self) -> Duration {
        match self.0 {
            None => POLL,
            Some(t) => t.saturating_duration_since(Instant::now()).min(POLL),
        }
    }
}

#[derive(Debug)]
struct Direction {
    tx: Sender<Message>,
    rx: Receiver<Message>,
}

#[derive(Debug)]
pub struct Channel {
    key: String,
    /// `dirs[s]` carries messages sent by side `s`.
    dirs: [Direction; 2],
    closed: [AtomicBool; 2],
}

impl Channel {
    pub fn new(key: impl Into<String>) -> Arc<Channel> {
        let dir = || {
            let (tx, rx) = bounded(CAPACITY);
            Direction { tx, rx }
        };
        Arc::new(Channel {
            key: key.into(),
            dirs: [dir(), dir()],
            closed: [AtomicBool::new(false), AtomicBool::new(false)],
        })
    }

    /// Both endpoints of a fresh channel.
    pub fn pair(key: impl Into<String>) -> (Endpoint, Endpoint) {
        let c = Channel::new(key);
        (Endpoint { chan: c.clone(), side: 0 }, Endpoint { chan: c, side: 1 })
    }
}

/// One participant's handle on a channel.
#[derive(Debug, Clone)]
pub struct Endpoint {
    chan: Arc<Channel>,
    side: usize,
}

impl PartialEq for Endpoint {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.chan, &other.chan) && self.side == other.side
    }
}

impl Endpoint {
    pub fn key(&self) -> &str {
        &self.chan.key
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn same_channel(&self, other: &Endpoint) -> bool {
        Arc::ptr_eq(&self.chan, &other.chan)
    }

    /// Marks this side as finished; the peer's receives fail once the queue
    /// towards it drains.
    pub fn close(&self) {
        self.chan.closed[self.side].store(true, Ordering::SeqCst);
    }

    pub fn send(&self, msg: Message, deadline: Deadline) -> Result<(), RtError> {
        let tx = &self.chan.dirs[self.side].tx;
        let mut msg = msg;
        loop {
            match tx.send_timeout(msg, deadline.slice()) {
                Ok(()) => return Ok(()),
                Err(SendTimeoutError::Timeout(m)) => {
                    if deadline.passed() {
                        return Err(RtError::Deadline(format!("send on '{}'", self.key())));
                    }
                    msg = m;
                }
                Err(SendTimeoutError::Disconnected(_)) => return Err(RtError::ClosedPeer(self.key().to_string())),
            }
        }
    }

    pub fn recv(&self, deadline: Deadline) -> Result<Message, RtError> {
        let peer = 1 - self.side;
        let rx = &self.chan.dirs[peer].rx;
        loop {
            match rx.recv_timeout(deadline.slice()) {
                Ok(m) => return Ok(m),
                Err(RecvTimeoutError::Timeout) => {
                    if self.chan.closed[peer].load(Ordering::SeqCst) && rx.is_empty() {
                        return Err(RtError::ClosedPeer(self.key().to_string()));
                    }
                    if deadline.passed() {
                        return Err(RtError::Deadline(format!("receive on '{}'", self.key())));
                    }
                }
                Err(RecvTimeoutError::Disconnected) => return Err(RtError::ClosedPeer(self.key().to_string())),
            }
        }
    }

    pub fn com_send(&self, v: Value, deadline: Deadline) -> Result<Value, RtError> {
        self.send(Message::Data(v.deep_copy()), deadline)?;
        Ok(Value::Unit)
    }

    pub fn com_receive(&self, deadline: Deadline) -> Result<Value, RtError> {
        match self.recv(deadline)? {
            Message::Data(v) => Ok(v),
            Message::Label { ty, case } => {
                Err(RtError::Protocol(format!("expected data on '{}' but received label {ty}.{case}", self.key())))
            }
        }
    }

    pub fn select_send(&self, label: &Value, deadline: Deadline) -> Result<Value, RtError> {
        let Value::Enum { ty, case } = label else {
            return Err(RtError::Type(format!("select expects an enum label, found {}", label.type_name())));
        };
        self.send(Message::Label { ty: ty.to_string(), case: case.to_string() }, deadline)?;
        Ok(Value::Unit)
    }

    pub fn select_receive(&self, deadline: Deadline) -> Result<Value, RtError> {
        match self.recv(deadline)? {
            Message::Label { ty, case } => Ok(Value::enum_case(&ty, &case)),
            Message::Data(v) => Err(RtError::Protocol(format!(
                "expected a label on '{}' but received data {}",
                self.key(),
                v.type_name()
            ))),
        }
    }
}

#[derive(Debug)]
struct Entry {
    chan: Arc<Channel>,
    /// Roles holding each side, in claim order.
    claims: Vec<String>,
}

/// Shared key to channel map. Lookups are serialised, so one key never
/// yields two channels.
#[derive(Debug, Default)]
pub struct Registry {
    entries: Mutex<HashMap<String, Entry>>,
}

impl Registry {
    pub fn new() -> Arc<Registry> {
        Arc::new(Registry::default())
    }

    /// The endpoint of `role` on the channel named `key`; creates the channel
    /// on first use. A role always receives the same side; a third role is
    /// rejected.
    pub fn endpoint(&self, key: &str, role: &str) -> Result<Endpoint, RtError> {
        if key.is_empty() {
            return Err(RtError::Channel("channel key must not be empty".into()));
        }
        let mut map = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        let entry = map.entry(key.to_string()).or_insert_with(|| Entry { chan: Channel::new(key), claims: Vec::new() });
        let side = match entry.claims.iter().position(|r| r == role) {
            Some(i) => i,
            None if entry.claims.len() < 2 => {
                entry.claims.push(role.to_string());
                entry.claims.len() - 1
            }
            None => {
                return Err(RtError::Channel(format!(
                    "channel '{key}' already connects {} and {}; '{role}' cannot join",
                    entry.claims[0], entry.claims[1]
                )))
            }
        };
        Ok(Endpoint { chan: entry.chan.clone(), side })
    }

    pub fn keys(&self) -> Vec<String> {
        let map = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        let mut keys: Vec<String> = map.keys().cloned().collect();
        keys.sort();
        keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soon() -> Deadline {
        Deadline::after(Duration::from_secs(2))
    }

    #[test]
    fn data_round_trip() {
        let (a, b) = Channel::pair("k");
        a.com_send(Value::Int(5), soon()).unwrap();
        a.com_send(Value::str("Hello"), soon()).unwrap();
        assert_eq!(b.com_receive(soon()).unwrap(), Value::Int(5));
        assert_eq!(b.com_receive(soon()).unwrap(), Value::str("Hello"));
    }

    #[test]
    fn labels_arrive_equal() {
        let (a, b) = Channel::pair("k");
        a.select_send(&Value::enum_case("Choice", "GO"), soon()).unwrap();
        assert_eq!(b.select_receive(soon()).unwrap(), Value::enum_case("Choice", "GO"));
        assert!(a.select_send(&Value::str("GO"), soon()).is_err());
    }

    #[test]
    fn receive_after_peer_exit_fails() {
        let (a, b) = Channel::pair("k");
        a.com_send(Value::Int(1), soon()).unwrap();
        a.close();
        assert_eq!(b.com_receive(soon()).unwrap(), Value::Int(1));
        assert!(matches!(b.com_receive(soon()), Err(RtError::ClosedPeer(_))));
    }

    #[test]
    fn receive_times_out() {
        let (_a, b) = Channel::pair("k");
        let r = b.com_receive(Deadline::after(Duration::from_millis(30)));
        assert!(matches!(r, Err(RtError::Deadline(_))));
    }

    #[test]
    fn registry_connects_two_roles() {
        let reg = Registry::new();
        let d = reg.endpoint("VST_channel1", "Device").unwrap();
        let g = reg.endpoint("VST_channel1", "Gatherer").unwrap();
        assert!(d.same_channel(&g));
        assert_ne!(d.side(), g.side());
        assert_eq!(reg.endpoint("VST_channel1", "Device").unwrap(), d);
        assert!(reg.endpoint("VST_channel1", "Auditor").is_err());
    }

    #[test]
    fn concurrent_lookups_share_one_channel() {
        let reg = Registry::new();
        let eps: Vec<Endpoint> = std::thread::scope(|s| {
            let hs: Vec<_> = ["A", "B"]
                .iter()
                .map(|r| {
                    let reg = &reg;
                    s.spawn(move || reg.endpoint("shared", r).unwrap())
                })
                .collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(eps[0].same_channel(&eps[1]));
    }

    #[test]
    fn fifo_per_direction() {
        let (a, b) = Channel::pair("k");
        std::thread::scope(|s| {
            s.spawn(|| {
                for i in 0..100 {
                    a.com_send(Value::Int(i), soon()).unwrap();
                }
            });
            for i in 0..100 {
                assert_eq!(b.com_receive(soon()).unwrap(), Value::Int(i));
            }
        });
    }
}

//! Ideal broadcast radio: lossless, unlimited range, same-step delivery.

use serde::{Deserialize, Serialize};

use crate::arena::Color;
use crate::inference::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Observation,
    Decision,
}

/// Positive feedback (`u+`, `On`) makes decided robots broadcast their
/// decision instead of their latest observation. Fixed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackMode {
    #[default]
    Off,
    On,
}

impl FeedbackMode {
    pub fn positive_feedback(self) -> bool {
        self == FeedbackMode::On
    }
}

impl std::fmt::Display for FeedbackMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if self.positive_feedback() { "on" } else { "off" })
    }
}

impl std::str::FromStr for FeedbackMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" | "true" | "u+" => Ok(FeedbackMode::On),
            "off" | "false" | "u-" => Ok(FeedbackMode::Off),
            other => Err(format!("feedback must be `on` or `off`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    pub color: Color,
    pub kind: MessageKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: usize,
    pub color: Color,
    pub kind: MessageKind,
    pub t_emit: u64,
}

pub fn compose_broadcast(d_f: Decision, last_color: Color, mode: FeedbackMode) -> Payload {
    match (mode.positive_feedback(), d_f.color()) {
        (true, Some(decided)) => Payload { color: decided, kind: MessageKind::Decision },
        _ => Payload { color: last_color, kind: MessageKind::Observation },
    }
}

/// Collects one step's emissions and hands them to every robot except the sender.
#[derive(Debug, Clone)]
pub struct Bus {
    inboxes: Vec<Vec<Message>>,
    pending: Vec<Message>,
}

impl Bus {
    pub fn new(n_robots: usize) -> Self {
        Self { inboxes: vec![Vec::new(); n_robots], pending: Vec::new() }
    }

    pub fn n_robots(&self) -> usize {
        self.inboxes.len()
    }

    pub fn emit(&mut self, msg: Message) {
        assert!(msg.sender < self.inboxes.len(), "unknown sender {}", msg.sender);
        self.pending.push(msg);
    }

    /// Delivers every pending message, in ascending sender order, and calls
    /// `on_delivery(recipient, &msg)` for each copy.
    pub fn deliver(&mut self, mut on_delivery: impl FnMut(usize, &Message)) {
        self.pending.sort_by_key(|m| m.sender);
        for msg in self.pending.drain(..) {
            for (recipient, inbox) in self.inboxes.iter_mut().enumerate() {
                if recipient != msg.sender {
                    on_delivery(recipient, &msg);
                    inbox.push(msg);
                }
            }
        }
    }

    pub fn inbox(&self, robot: usize) -> &[Message] {
        &self.inboxes[robot]
    }

    pub fn drain(&mut self, robot: usize) -> std::vec::Drain<'_, Message> {
        self.inboxes[robot].drain(..)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(sender: usize, color: Color) -> Message {
        Message { sender, color, kind: MessageKind::Observation, t_emit: 3 }
    }

    #[test]
    fn composition_rules() {
        let p = compose_broadcast(Decision::White, Color::Black, FeedbackMode::Off);
        assert_eq!(p, Payload { color: Color::Black, kind: MessageKind::Observation });
        let p = compose_broadcast(Decision::Undecided, Color::White, FeedbackMode::On);
        assert_eq!(p, Payload { color: Color::White, kind: MessageKind::Observation });
        let p = compose_broadcast(Decision::Black, Color::White, FeedbackMode::On);
        assert_eq!(p, Payload { color: Color::Black, kind: MessageKind::Decision });
    }

    #[test]
    fn broadcast_excludes_sender() {
        let mut bus = Bus::new(4);
        bus.emit(msg(0, Color::White));
        let mut count = 0;
        bus.deliver(|_, _| count += 1);
        assert_eq!(count, 3);
        assert!(bus.inbox(0).is_empty());
        for r in 1..4 {
            assert_eq!(bus.inbox(r), &[msg(0, Color::White)]);
        }
    }

    #[test]
    fn same_step_messages_arrive_in_sender_order() {
        let mut bus = Bus::new(4);
        bus.emit(msg(3, Color::Black));
        bus.emit(msg(1, Color::White));
        bus.deliver(|_, _| {});
        assert_eq!(bus.inbox(0), &[msg(1, Color::White), msg(3, Color::Black)]);
        assert_eq!(bus.inbox(2), &[msg(1, Color::White), msg(3, Color::Black)]);
        assert_eq!(bus.inbox(1), &[msg(3, Color::Black)]);
        assert_eq!(bus.inbox(3), &[msg(1, Color::White)]);
        let drained: Vec<_> = bus.drain(0).collect();
        assert_eq!(drained.len(), 2);
        assert!(bus.inbox(0).is_empty());
    }

    #[test]
    fn conservation() {
        for n in 2..8 {
            for emitters in 0..=n {
                let mut bus = Bus::new(n);
                for s in 0..emitters {
                    bus.emit(msg(s, Color::White));
                }
                let mut received = 0;
                bus.deliver(|_, _| received += 1);
                assert_eq!(received, emitters * (n - 1));
            }
        }
    }
}

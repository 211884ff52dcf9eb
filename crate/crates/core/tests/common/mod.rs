//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod chains;
pub mod flows;
pub mod layout;

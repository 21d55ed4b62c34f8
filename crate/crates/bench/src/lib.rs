//! Shared fixtures for the criterion benches.

use weqlab_core::action::translation_action;
use weqlab_core::group::DEFAULT_ENUMERATION_BUDGET;
use weqlab_core::{FiniteAction, FiniteGroup, GeneratorSet};

pub fn sl2(n: u32) -> FiniteGroup {
    FiniteGroup::enumerate(2, n, DEFAULT_ENUMERATION_BUDGET).expect("desk-scale modulus")
}

pub fn sanov_action(g: &FiniteGroup) -> FiniteAction {
    translation_action(g, &GeneratorSet::sanov()).expect("dimension 2")
}

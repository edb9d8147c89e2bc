use serde::{Deserialize, Serialize};

use super::{from_json, to_json, IoError, VERSION};
use crate::cost::ExtCost;
use crate::zerosum::{Side, ValueMap, ZeroSumGame};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueEntry {
    pub vertex: String,
    pub side: Side,
    pub value: ExtCost,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<String>,
}

/// Values of a solved zero-sum game, vertex by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueMapFile {
    pub version: u32,
    pub player: String,
    pub initial: String,
    pub initial_value: ExtCost,
    pub values: Vec<ValueEntry>,
}

impl ValueMapFile {
    pub fn new(player: &str, zs: &ZeroSumGame, vm: &ValueMap) -> ValueMapFile {
        ValueMapFile {
            version: VERSION,
            player: player.to_string(),
            initial: zs.names[zs.initial].clone(),
            initial_value: vm.at(zs.initial),
            values: (0..zs.len())
                .map(|v| ValueEntry {
                    vertex: zs.names[v].clone(),
                    side: zs.owner[v],
                    value: vm.at(v),
                    choice: vm.choice[v].map(|c| zs.names[c].clone()),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<ValueMapFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}

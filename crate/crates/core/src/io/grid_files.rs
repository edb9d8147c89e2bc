use std::collections::HashSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{from_json, ratio, to_json, CertificateEntry, IoError, VERSION};
use crate::cost::Weight;
use crate::microgrid::{
    BillReport, BillingMode, ExperimentRow, GridError, GridInstance, House, Metrics, Prices,
    Schedule, Task,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub id: String,
    pub energy: Weight,
    /// First and last admissible slot.
    pub interval: [u32; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseEntry {
    pub id: String,
    pub tasks: Vec<TaskEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricesEntry {
    #[serde(with = "ratio")]
    pub p_in: Rational64,
    #[serde(with = "ratio")]
    pub p_out: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub slots: u32,
    /// Production of each house, slot by slot.
    pub prod: Vec<Weight>,
    pub prices: PricesEntry,
    #[serde(default)]
    pub billing: BillingMode,
    #[serde(default)]
    pub credit_exports: bool,
    pub houses: Vec<HouseEntry>,
}

impl InstanceFile {
    pub fn from_instance(inst: &GridInstance) -> InstanceFile {
        InstanceFile {
            version: VERSION,
            slots: inst.slots,
            prod: inst.prod.clone(),
            prices: PricesEntry {
                p_in: inst.prices.p_in,
                p_out: inst.prices.p_out,
            },
            billing: inst.billing,
            credit_exports: inst.credit_exports,
            houses: inst
                .houses
                .iter()
                .map(|h| HouseEntry {
                    id: h.id.clone(),
                    tasks: h
                        .tasks
                        .iter()
                        .map(|t| TaskEntry {
                            id: t.id.clone(),
                            energy: t.energy,
                            interval: [t.window.0, t.window.1],
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<GridInstance, IoError> {
        let inst = GridInstance {
            houses: self
                .houses
                .iter()
                .map(|h| House {
                    id: h.id.clone(),
                    tasks: h
                        .tasks
                        .iter()
                        .map(|t| Task {
                            id: t.id.clone(),
                            energy: t.energy,
                            window: (t.interval[0], t.interval[1]),
                        })
                        .collect(),
                })
                .collect(),
            slots: self.slots,
            prod: self.prod.clone(),
            prices: Prices {
                p_in: self.prices.p_in,
                p_out: self.prices.p_out,
            },
            billing: self.billing,
            credit_exports: self.credit_exports,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn parse(text: &str) -> Result<GridInstance, IoError> {
        from_json::<InstanceFile>(text)?.to_instance()
    }

    pub fn emit(inst: &GridInstance) -> String {
        to_json(&InstanceFile::from_instance(inst))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseTasks {
    pub house: String,
    pub tasks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotEntry {
    pub slot: u32,
    pub houses: Vec<HouseTasks>,
}

/// Slots where something runs, with the tasks of each busy house.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_min: Option<Weight>,
    pub slots: Vec<SlotEntry>,
}

impl ScheduleFile {
    pub fn from_schedule(inst: &GridInstance, s: &Schedule, e_min: Option<Weight>) -> ScheduleFile {
        let tasks: Vec<_> = inst.tasks().collect();
        let slots = (1..=inst.slots)
            .filter_map(|d| {
                let houses: Vec<HouseTasks> = inst
                    .houses
                    .iter()
                    .enumerate()
                    .filter_map(|(h, house)| {
                        let ids: Vec<String> = tasks
                            .iter()
                            .zip(&s.slot_of)
                            .filter(|((hh, _), &sd)| *hh == h && sd == d)
                            .map(|((_, t), _)| t.id.clone())
                            .collect();
                        (!ids.is_empty()).then(|| HouseTasks {
                            house: house.id.clone(),
                            tasks: ids,
                        })
                    })
                    .collect();
                (!houses.is_empty()).then_some(SlotEntry { slot: d, houses })
            })
            .collect();
        ScheduleFile {
            version: VERSION,
            e_min,
            slots,
        }
    }

    /// Every task exactly once, listed under its own house.
    pub fn to_schedule(&self, inst: &GridInstance) -> Result<Schedule, IoError> {
        let mut slots = vec![None; inst.num_tasks()];
        let mut seen = HashSet::new();
        let owner: Vec<usize> = inst.tasks().map(|(h, _)| h).collect();
        for entry in &self.slots {
            for ht in &entry.houses {
                let h = inst
                    .houses
                    .iter()
                    .position(|x| x.id == ht.house)
                    .ok_or_else(|| GridError::UnknownTask(format!("{}/*", ht.house)))?;
                for id in &ht.tasks {
                    let k = inst
                        .task_index(id)
                        .filter(|&k| owner[k] == h)
                        .ok_or_else(|| GridError::UnknownTask(format!("{}/{id}", ht.house)))?;
                    if !seen.insert(k) {
                        return Err(GridError::DuplicateTask(id.clone()).into());
                    }
                    slots[k] = Some(entry.slot);
                }
            }
        }
        Ok(Schedule::from_slots(inst, slots)?)
    }

    pub fn parse(text: &str) -> Result<ScheduleFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotBillEntry {
    pub slot: u32,
    pub excess: Vec<Weight>,
    pub tot_c: Weight,
    pub tot_o: Weight,
    pub tot_s: Weight,
    #[serde(with = "ratio")]
    pub b_tot: Rational64,
    #[serde(with = "ratio::vec")]
    pub bills: Vec<Rational64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BillReportEntry {
    pub billing: BillingMode,
    pub houses: Vec<String>,
    pub slots: Vec<SlotBillEntry>,
    #[serde(with = "ratio::vec")]
    pub totals: Vec<Rational64>,
    #[serde(with = "ratio::vec")]
    pub penalties: Vec<Rational64>,
}

impl BillReportEntry {
    pub fn from_report(inst: &GridInstance, r: &BillReport) -> BillReportEntry {
        BillReportEntry {
            billing: inst.billing,
            houses: inst.houses.iter().map(|h| h.id.clone()).collect(),
            slots: r
                .slots
                .iter()
                .enumerate()
                .map(|(k, s)| SlotBillEntry {
                    slot: k as u32 + 1,
                    excess: s.excess.clone(),
                    tot_c: s.tot_c,
                    tot_o: s.tot_o,
                    tot_s: s.tot_s,
                    b_tot: s.b_tot,
                    bills: s.bills.clone(),
                })
                .collect(),
            totals: r.totals.clone(),
            penalties: r.penalties.clone(),
        }
    }
}

/// Figures of one schedule against the coalition optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsFile {
    pub version: u32,
    pub imported_energy: Weight,
    pub e_min: Weight,
    pub energy_gap: Weight,
    #[serde(with = "ratio::vec")]
    pub bills: Vec<Rational64>,
    #[serde(with = "ratio::vec")]
    pub reference_bills: Vec<Rational64>,
    pub bill_gap_percent: Vec<f64>,
}

impl MetricsFile {
    pub fn from_metrics(m: &Metrics) -> MetricsFile {
        MetricsFile {
            version: VERSION,
            imported_energy: m.imported_energy,
            e_min: m.e_min,
            energy_gap: m.energy_gap,
            bills: m.bills.clone(),
            reference_bills: m.reference_bills.clone(),
            bill_gap_percent: m.bill_gap_percent.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<MetricsFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}

/// Output of the equilibrium pipeline on an instance: the certificate in
/// the penalized game, the schedule it implements and its bills.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridNeFile {
    pub version: u32,
    pub order: Vec<Vec<String>>,
    /// Guaranteed bill of each house, charged on its first deviation.
    #[serde(with = "ratio::vec")]
    pub penalties: Vec<Rational64>,
    /// Houses whose penalty is negative.
    pub negative_penalties: Vec<String>,
    /// The outcome passes the check without penalties too.
    pub valid_without_penalty: bool,
    pub certificate: CertificateEntry,
    pub schedule: ScheduleFile,
    pub bills: BillReportEntry,
}

impl GridNeFile {
    pub fn parse(text: &str) -> Result<GridNeFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}

/// The experiment table with a header row.
pub fn write_metrics_csv(rows: &[ExperimentRow]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Value(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

pub fn read_metrics_csv(text: &str) -> Result<Vec<ExperimentRow>, IoError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<Result<Vec<ExperimentRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microgrid::{bill_schedule, optimal_coalition_schedule};

    #[test]
    fn instance_round_trip() {
        let inst = GridInstance::example();
        let text = InstanceFile::emit(&inst);
        assert!(text.contains("\"p_out\": [\n      2,\n      1\n    ]"));
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(InstanceFile::emit(&back), text);
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let text = InstanceFile::emit(&GridInstance::example()).replace("\"energy\": 4", "\"energy\": -4");
        assert!(matches!(
            InstanceFile::parse(&text),
            Err(IoError::Grid(GridError::NegativeEnergy(_)))
        ));
        let text = InstanceFile::emit(&GridInstance::example()).replacen("[\n      1,\n      1\n    ]", "[1, 0]", 1);
        assert!(matches!(InstanceFile::parse(&text), Err(IoError::Schema { .. })));
    }

    #[test]
    fn schedule_round_trip() {
        let inst = GridInstance::example();
        let (s, e) = optimal_coalition_schedule(&inst).unwrap();
        let f = ScheduleFile::from_schedule(&inst, &s, Some(e));
        let text = f.emit();
        let back = ScheduleFile::parse(&text).unwrap();
        assert_eq!(back.emit(), text);
        assert_eq!(back.to_schedule(&inst).unwrap(), s);
        assert_eq!(f.slots[0].houses[0].house, "H2");
    }

    #[test]
    fn incomplete_schedule_names_missing_tasks() {
        let inst = GridInstance::example();
        let f = ScheduleFile::parse(
            r#"{"version": 1, "slots": [{"slot": 1, "houses": [{"house": "H1", "tasks": ["t1"]}]}]}"#,
        )
        .unwrap();
        match f.to_schedule(&inst) {
            Err(IoError::Grid(GridError::Incomplete(m))) => assert_eq!(m, vec!["t2".to_string()]),
            other => panic!("{other:?}"),
        }
        let wrong_house = ScheduleFile::parse(
            r#"{"version": 1, "slots": [{"slot": 1, "houses": [{"house": "H1", "tasks": ["t2"]}]}]}"#,
        )
        .unwrap();
        assert!(wrong_house.to_schedule(&inst).is_err());
    }

    #[test]
    fn bill_report_serializes_exact_rationals() {
        let inst = GridInstance {
            credit_exports: true,
            ..GridInstance::example()
        };
        let r = bill_schedule(&inst, &Schedule { slot_of: vec![1, 2] });
        let e = BillReportEntry::from_report(&inst, &r);
        let text = serde_json::to_string(&e).unwrap();
        let back: BillReportEntry = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(e.slots[0].bills, vec![Rational64::from_integer(0), Rational64::from_integer(-8)]);
        assert!(text.contains("\"bills\":[[0,1],[-8,1]]"));
    }

    #[test]
    fn metrics_csv_uses_table_columns() {
        let rows = vec![ExperimentRow {
            houses: 2,
            tasks: 3,
            cases: 10,
            energy_difference: 0.0,
            bill_difference: -8.08,
        }];
        let text = write_metrics_csv(&rows).unwrap();
        assert_eq!(
            text,
            "Houses,Tasks,Number of cases,Total energy difference,Average bill difference\n2,3,10,0.0,-8.08\n"
        );
        assert_eq!(read_metrics_csv(&text).unwrap(), rows);
    }
}

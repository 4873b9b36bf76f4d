//! Scattering-network data model: directed links, couplers, segments,
//! scatterers, external ports and the dipole probe.
//!
//! Every waveguide arc carries two independent directed amplitudes. A
//! coupler relates its four inputs to its four outputs as two decoupled
//! 2×2 splitters (one per direction); a scatterer is the only element that
//! mixes the two directions. The dipole probe is bookkeeping only: it
//! marks a position on a segment and never enters the linear system.

mod netlist;
mod templates;

pub use netlist::{parse_netlist, NetlistError};
pub use templates::{
    default_dipole, default_mode, template_ring, template_ring_backscatter, template_sagnac_device,
    template_waveguide,
};

use std::collections::HashMap;
use std::fmt;

use crate::emission::{DipoleSpec, ModeContext};

/// One directed mode amplitude on a waveguide arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId(u32);

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Directed four-port relation of one coupler direction:
/// `out_a = σ·in_a + iκ·in_b`, `out_b = iκ·in_a + σ·in_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedPair {
    pub in_a: LinkId,
    pub in_b: LinkId,
    pub out_a: LinkId,
    pub out_b: LinkId,
}

impl DirectedPair {
    fn inputs(&self) -> [LinkId; 2] {
        [self.in_a, self.in_b]
    }

    fn outputs(&self) -> [LinkId; 2] {
        [self.out_a, self.out_b]
    }
}

/// Evanescent coupler between two rails, with self-coupling σ and derived
/// cross-coupling κ = √(1 − σ²).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplerElement {
    pub id: String,
    pub sigma: f64,
    pub fwd: DirectedPair,
    pub bwd: DirectedPair,
}

impl CouplerElement {
    pub fn kappa(&self) -> f64 {
        (1.0 - self.sigma * self.sigma).sqrt()
    }
}

/// Propagation arc applying `atten · e^{iδ}` along each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentElement {
    pub id: String,
    /// Accumulated phase δ (rad), stored unreduced.
    pub phase: f64,
    /// Amplitude attenuation in (0, 1]; 1 marks the segment lossless.
    pub atten: f64,
    /// Forward direction (input, output).
    pub fwd: (LinkId, LinkId),
    /// Backward direction (input, output).
    pub bwd: (LinkId, LinkId),
}

/// Lumped reflector coupling the two circulation directions at one point:
/// `out_ccw = τ·in_ccw + iρ·in_cw`, `out_cw = iρ·in_ccw + τ·in_cw`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererElement {
    pub id: String,
    pub rho: f64,
    /// Counterclockwise direction (input, output).
    pub ccw: (LinkId, LinkId),
    /// Clockwise direction (input, output).
    pub cw: (LinkId, LinkId),
}

impl ScattererElement {
    pub fn tau(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Coupler(CouplerElement),
    Segment(SegmentElement),
    Scatterer(ScattererElement),
}

impl Element {
    pub fn id(&self) -> &str {
        match self {
            Element::Coupler(c) => &c.id,
            Element::Segment(s) => &s.id,
            Element::Scatterer(s) => &s.id,
        }
    }
}

/// External radiation channel with one input and one output link.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalPort {
    pub label: String,
    pub input: LinkId,
    pub output: LinkId,
}

/// Dipole position: a host segment and a fractional offset along its
/// forward direction. The probe splits the host phase into `s·δ` seen by
/// the forward amplitude and `(1−s)·δ` seen by the backward one.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleProbe {
    pub segment: String,
    pub offset: f64,
}

impl DipoleProbe {
    /// Sub-segment phases (forward-side, backward-side); they sum to the
    /// host phase.
    pub fn sub_phases(&self, host: &SegmentElement) -> (f64, f64) {
        let a = self.offset * host.phase;
        (a, host.phase - a)
    }
}

/// A validated scattering network plus the mode and emitter data needed to
/// turn solved amplitudes into physical rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub mode: ModeContext,
    pub dipole: DipoleSpec,
    link_names: Vec<String>,
    pub elements: Vec<Element>,
    pub ports: Vec<ExternalPort>,
    pub probe: Option<DipoleProbe>,
}

/// Construction-time errors shared by the parser and the templates.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    SigmaOutOfRange(f64),
    RhoOutOfRange(f64),
    AttenOutOfRange(f64),
    OffsetOutOfRange(f64),
    NonFiniteValue(&'static str),
    DuplicateElement(String),
    DuplicatePort(String),
    DuplicateProbe,
    UnknownProbeSegment(String),
    /// Structural validation failed after assembly of the element list.
    Invalid(Vec<String>),
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::SigmaOutOfRange(v) => write!(f, "sigma out of range: {v} not in [0, 1]"),
            CircuitError::RhoOutOfRange(v) => write!(f, "rho out of range: {v} not in [0, 1]"),
            CircuitError::AttenOutOfRange(v) => {
                write!(f, "atten out of range: {v} not in (0, 1]")
            }
            CircuitError::OffsetOutOfRange(v) => {
                write!(f, "offset out of range: {v} not in [0, 1]")
            }
            CircuitError::NonFiniteValue(what) => write!(f, "{what} must be finite"),
            CircuitError::DuplicateElement(id) => write!(f, "duplicate identifier {id}"),
            CircuitError::DuplicatePort(id) => write!(f, "duplicate port label {id}"),
            CircuitError::DuplicateProbe => write!(f, "more than one probe"),
            CircuitError::UnknownProbeSegment(id) => {
                write!(f, "probe references unknown segment {id}")
            }
            CircuitError::Invalid(diags) => write!(f, "invalid circuit: {}", diags.join("; ")),
        }
    }
}

impl std::error::Error for CircuitError {}

impl Circuit {
    pub fn link_count(&self) -> usize {
        self.link_names.len()
    }

    pub fn link_name(&self, id: LinkId) -> &str {
        &self.link_names[id.index()]
    }

    pub fn link_id(&self, name: &str) -> Option<LinkId> {
        self.link_names.iter().position(|n| n == name).map(|i| LinkId(i as u32))
    }

    /// True iff every segment has attenuation exactly 1.
    pub fn is_lossless(&self) -> bool {
        self.elements.iter().all(|e| match e {
            Element::Segment(s) => s.atten == 1.0,
            _ => true,
        })
    }

    pub fn port_index(&self, label: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.label == label)
    }

    pub fn segment(&self, id: &str) -> Option<&SegmentElement> {
        self.elements.iter().find_map(|e| match e {
            Element::Segment(s) if s.id == id => Some(s),
            _ => None,
        })
    }

    pub fn segment_mut(&mut self, id: &str) -> Option<&mut SegmentElement> {
        self.elements.iter_mut().find_map(|e| match e {
            Element::Segment(s) if s.id == id => Some(s),
            _ => None,
        })
    }

    /// The segment hosting the dipole probe, if a probe is present.
    pub fn probe_segment(&self) -> Option<&SegmentElement> {
        let probe = self.probe.as_ref()?;
        self.segment(&probe.segment)
    }

    /// Structural diagnostics; an empty list means the network is sound.
    ///
    /// Checks that every link is driven exactly once (by an element output
    /// or an external input) and consumed exactly once (by an element input
    /// or an external output), that element parameters are in range, that a
    /// probe exists and sits on a real segment, and that at least one
    /// external port is defined.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        let n = self.link_count();
        let mut drivers = vec![0usize; n];
        let mut consumers = vec![0usize; n];

        for element in &self.elements {
            match element {
                Element::Coupler(c) => {
                    for pair in [&c.fwd, &c.bwd] {
                        for l in pair.inputs() {
                            consumers[l.index()] += 1;
                        }
                        for l in pair.outputs() {
                            drivers[l.index()] += 1;
                        }
                    }
                    let fwd = [c.fwd.in_a, c.fwd.in_b, c.fwd.out_a, c.fwd.out_b];
                    let bwd = [c.bwd.in_a, c.bwd.in_b, c.bwd.out_a, c.bwd.out_b];
                    if fwd.iter().any(|l| bwd.contains(l)) {
                        diags.push(format!(
                            "coupler {} forward and backward pairs share a link",
                            c.id
                        ));
                    }
                    if !(0.0..=1.0).contains(&c.sigma) {
                        diags.push(format!("coupler {}: sigma out of range", c.id));
                    } else {
                        let k = c.kappa();
                        if (c.sigma * c.sigma + k * k - 1.0).abs() > 1e-12 {
                            diags.push(format!("coupler {}: sigma^2 + kappa^2 != 1", c.id));
                        }
                    }
                }
                Element::Segment(s) => {
                    consumers[s.fwd.0.index()] += 1;
                    drivers[s.fwd.1.index()] += 1;
                    consumers[s.bwd.0.index()] += 1;
                    drivers[s.bwd.1.index()] += 1;
                    if !(s.atten > 0.0 && s.atten <= 1.0) {
                        diags.push(format!("segment {}: atten out of range", s.id));
                    }
                    if !s.phase.is_finite() {
                        diags.push(format!("segment {}: phase not finite", s.id));
                    }
                }
                Element::Scatterer(s) => {
                    consumers[s.ccw.0.index()] += 1;
                    drivers[s.ccw.1.index()] += 1;
                    consumers[s.cw.0.index()] += 1;
                    drivers[s.cw.1.index()] += 1;
                    if !(0.0..=1.0).contains(&s.rho) {
                        diags.push(format!("scatterer {}: rho out of range", s.id));
                    }
                }
            }
        }
        for port in &self.ports {
            drivers[port.input.index()] += 1;
            consumers[port.output.index()] += 1;
        }

        for (i, name) in self.link_names.iter().enumerate() {
            if drivers[i] != 1 {
                diags.push(format!("link {name} has {} drivers", drivers[i]));
            }
            if consumers[i] != 1 {
                diags.push(format!("link {name} has {} consumers", consumers[i]));
            }
        }

        if self.ports.is_empty() {
            diags.push("no external ports".to_string());
        }
        match &self.probe {
            None => diags.push("no dipole probe".to_string()),
            Some(probe) => {
                if self.segment(&probe.segment).is_none() {
                    diags.push(format!("probe references unknown segment {}", probe.segment));
                }
                if !(0.0..=1.0).contains(&probe.offset) {
                    diags.push("probe offset out of range".to_string());
                }
            }
        }
        diags
    }
}

/// Incremental circuit constructor used by both the parser and the
/// templates; link ids are interned in first-reference order, which keeps
/// serialize → parse round trips structurally identical.
#[derive(Debug)]
pub struct CircuitBuilder {
    mode: ModeContext,
    dipole: DipoleSpec,
    link_names: Vec<String>,
    by_name: HashMap<String, LinkId>,
    elements: Vec<Element>,
    ports: Vec<ExternalPort>,
    probe: Option<DipoleProbe>,
}

impl CircuitBuilder {
    pub fn new(mode: ModeContext, dipole: DipoleSpec) -> Self {
        Self {
            mode,
            dipole,
            link_names: Vec::new(),
            by_name: HashMap::new(),
            elements: Vec::new(),
            ports: Vec::new(),
            probe: None,
        }
    }

    fn intern(&mut self, name: &str) -> LinkId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = LinkId(self.link_names.len() as u32);
        self.link_names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        id
    }

    fn check_id(&self, id: &str) -> Result<(), CircuitError> {
        if self.elements.iter().any(|e| e.id() == id) {
            return Err(CircuitError::DuplicateElement(id.to_string()));
        }
        Ok(())
    }

    pub fn coupler(
        &mut self,
        id: &str,
        sigma: f64,
        fwd: [&str; 4],
        bwd: [&str; 4],
    ) -> Result<&mut Self, CircuitError> {
        self.check_id(id)?;
        if !sigma.is_finite() {
            return Err(CircuitError::NonFiniteValue("sigma"));
        }
        if !(0.0..=1.0).contains(&sigma) {
            return Err(CircuitError::SigmaOutOfRange(sigma));
        }
        let fwd = DirectedPair {
            in_a: self.intern(fwd[0]),
            in_b: self.intern(fwd[1]),
            out_a: self.intern(fwd[2]),
            out_b: self.intern(fwd[3]),
        };
        let bwd = DirectedPair {
            in_a: self.intern(bwd[0]),
            in_b: self.intern(bwd[1]),
            out_a: self.intern(bwd[2]),
            out_b: self.intern(bwd[3]),
        };
        self.elements.push(Element::Coupler(CouplerElement {
            id: id.to_string(),
            sigma,
            fwd,
            bwd,
        }));
        Ok(self)
    }

    pub fn segment(
        &mut self,
        id: &str,
        phase: f64,
        atten: f64,
        fwd: [&str; 2],
        bwd: [&str; 2],
    ) -> Result<&mut Self, CircuitError> {
        self.check_id(id)?;
        if !phase.is_finite() {
            return Err(CircuitError::NonFiniteValue("phase"));
        }
        if !(atten > 0.0 && atten <= 1.0) {
            return Err(CircuitError::AttenOutOfRange(atten));
        }
        let fwd = (self.intern(fwd[0]), self.intern(fwd[1]));
        let bwd = (self.intern(bwd[0]), self.intern(bwd[1]));
        self.elements.push(Element::Segment(SegmentElement {
            id: id.to_string(),
            phase,
            atten,
            fwd,
            bwd,
        }));
        Ok(self)
    }

    pub fn scatterer(
        &mut self,
        id: &str,
        rho: f64,
        ccw: [&str; 2],
        cw: [&str; 2],
    ) -> Result<&mut Self, CircuitError> {
        self.check_id(id)?;
        if !rho.is_finite() {
            return Err(CircuitError::NonFiniteValue("rho"));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(CircuitError::RhoOutOfRange(rho));
        }
        let ccw = (self.intern(ccw[0]), self.intern(ccw[1]));
        let cw = (self.intern(cw[0]), self.intern(cw[1]));
        self.elements.push(Element::Scatterer(ScattererElement {
            id: id.to_string(),
            rho,
            ccw,
            cw,
        }));
        Ok(self)
    }

    pub fn port(
        &mut self,
        label: &str,
        input: &str,
        output: &str,
    ) -> Result<&mut Self, CircuitError> {
        if self.ports.iter().any(|p| p.label == label) {
            return Err(CircuitError::DuplicatePort(label.to_string()));
        }
        let input = self.intern(input);
        let output = self.intern(output);
        self.ports.push(ExternalPort { label: label.to_string(), input, output });
        Ok(self)
    }

    pub fn probe(&mut self, segment: &str, offset: f64) -> Result<&mut Self, CircuitError> {
        if self.probe.is_some() {
            return Err(CircuitError::DuplicateProbe);
        }
        if !offset.is_finite() {
            return Err(CircuitError::NonFiniteValue("offset"));
        }
        if !(0.0..=1.0).contains(&offset) {
            return Err(CircuitError::OffsetOutOfRange(offset));
        }
        self.probe = Some(DipoleProbe { segment: segment.to_string(), offset });
        Ok(self)
    }

    /// Finish construction and run structural validation.
    pub fn finish(self) -> Result<Circuit, CircuitError> {
        if let Some(probe) = &self.probe {
            let exists = self.elements.iter().any(|e| match e {
                Element::Segment(s) => s.id == probe.segment,
                _ => false,
            });
            if !exists {
                return Err(CircuitError::UnknownProbeSegment(probe.segment.clone()));
            }
        }
        let circuit = Circuit {
            mode: self.mode,
            dipole: self.dipole,
            link_names: self.link_names,
            elements: self.elements,
            ports: self.ports,
            probe: self.probe,
        };
        let diags = circuit.validate();
        if diags.is_empty() {
            Ok(circuit)
        } else {
            Err(CircuitError::Invalid(diags))
        }
    }

    /// Finish without validating; used to build deliberately broken
    /// circuits in tests of `Circuit::validate`.
    pub fn finish_unchecked(self) -> Circuit {
        Circuit {
            mode: self.mode,
            dipole: self.dipole,
            link_names: self.link_names,
            elements: self.elements,
            ports: self.ports,
            probe: self.probe,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::templates::default_mode;
    use super::*;
    use crate::emission::DipoleSpec;

    fn builder() -> CircuitBuilder {
        CircuitBuilder::new(default_mode(), DipoleSpec::new(1e-29, 0))
    }

    #[test]
    fn valid_ring_template_has_no_diagnostics() {
        let c = template_ring(0.98, 0.0, 0.25).unwrap();
        assert!(c.validate().is_empty());
        assert_eq!(c.link_count(), 8);
    }

    #[test]
    fn double_consumption_is_reported() {
        let mut b = builder();
        // r2 feeds both the segment and the port output.
        b.segment("s1", 0.5, 1.0, ["r1", "r2"], ["r3", "r4"]).unwrap();
        b.segment("s2", 0.5, 1.0, ["r2", "r1"], ["r4", "r3"]).unwrap();
        b.port("L", "r2", "r2").unwrap();
        b.probe("s1", 0.5).unwrap();
        let c = b.finish_unchecked();
        let diags = c.validate();
        assert!(diags.iter().any(|d| d == "link r2 has 2 consumers"), "{diags:?}");
        assert!(diags.iter().any(|d| d == "link r2 has 2 drivers"), "{diags:?}");
    }

    #[test]
    fn missing_probe_is_reported() {
        let mut b = builder();
        b.segment("wg", 0.0, 1.0, ["a", "b"], ["c", "d"]).unwrap();
        b.port("L", "a", "d").unwrap();
        b.port("R", "c", "b").unwrap();
        let c = b.finish_unchecked();
        assert!(c.validate().contains(&"no dipole probe".to_string()));
    }

    #[test]
    fn coupler_direction_pairs_must_be_disjoint() {
        let mut b = builder();
        // The backward pair reuses a forward link.
        b.coupler("c0", 0.9, ["a", "b", "c", "d"], ["e", "a", "f", "g"]).unwrap();
        let c = b.finish_unchecked();
        let diags = c.validate();
        assert!(
            diags.iter().any(|d| d == "coupler c0 forward and backward pairs share a link"),
            "{diags:?}"
        );
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(matches!(
            builder().coupler("c", 1.2, ["a", "b", "c", "d"], ["e", "f", "g", "h"]),
            Err(CircuitError::SigmaOutOfRange(_))
        ));
        assert!(matches!(
            builder().scatterer("s", -0.1, ["a", "b"], ["c", "d"]),
            Err(CircuitError::RhoOutOfRange(_))
        ));
        assert!(matches!(
            builder().segment("s", 1.0, 0.0, ["a", "b"], ["c", "d"]),
            Err(CircuitError::AttenOutOfRange(_))
        ));
        assert!(matches!(builder().probe("s", 1.5), Err(CircuitError::OffsetOutOfRange(_))));
    }

    #[test]
    fn boundary_couplings_are_structurally_legal() {
        // σ = 1 and ρ = 1 are degenerate but construct fine; the solver is
        // the layer that rejects them when they actually produce a pole.
        assert!(template_ring(1.0, 0.0, 0.5).is_ok());
        assert!(template_ring_backscatter(0.9, 1.0, 0.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn probe_split_sums_to_host_phase() {
        let c = template_ring(0.9, 4.321, 0.37).unwrap();
        let host = c.probe_segment().unwrap();
        let probe = c.probe.as_ref().unwrap();
        let (a, b) = probe.sub_phases(host);
        assert!((a + b - host.phase).abs() < 1e-12);
    }

    #[test]
    fn duplicate_identifiers_are_rejected() {
        let mut b = builder();
        b.segment("s1", 0.0, 1.0, ["a", "b"], ["c", "d"]).unwrap();
        assert!(matches!(
            b.segment("s1", 0.0, 1.0, ["e", "f"], ["g", "h"]),
            Err(CircuitError::DuplicateElement(_))
        ));
        let mut b = builder();
        b.port("L", "a", "b").unwrap();
        assert!(matches!(b.port("L", "c", "d"), Err(CircuitError::DuplicatePort(_))));
    }

    #[test]
    fn template_topology_counts() {
        let count = |c: &Circuit| {
            let mut n = (0, 0, 0);
            for e in &c.elements {
                match e {
                    Element::Coupler(_) => n.0 += 1,
                    Element::Segment(_) => n.1 += 1,
                    Element::Scatterer(_) => n.2 += 1,
                }
            }
            n
        };
        assert_eq!(count(&template_waveguide(0.0, 0.5).unwrap()), (0, 1, 0));
        // Ring: one coupler carrying the through path, one ring arc.
        assert_eq!(count(&template_ring(0.9, 0.0, 0.5).unwrap()), (1, 1, 0));
        // Backscatter ring splits the arc and adds exactly one scatterer.
        assert_eq!(count(&template_ring_backscatter(0.9, 0.1, 1.0, 2.0, 0.5).unwrap()), (1, 2, 1));
        // The interferometric device has three coupling points.
        assert_eq!(
            count(&template_sagnac_device(0.7, 0.9, 0.8, [0.1, 0.2, 0.3, 0.4, 0.5], 0.5).unwrap()),
            (3, 5, 0)
        );
    }
}

use glam::DVec2;

use super::{AgentState, Obstacle, PmdTypeParams, SfmConstants, World};

/// Stand-in separation for agents at the same position.
const COINCIDENT_M: f64 = 0.01;
/// Below this semi-minor axis the elliptical gradient is singular.
const B_FLOOR: f64 = 1e-9;

/// Relaxation toward the desired velocity. At the target the desired
/// direction is zero, leaving pure braking.
pub fn goal_force(a: &AgentState, c: &SfmConstants) -> DVec2 {
    let e = (a.target() - a.position).normalize_or_zero();
    (a.desired_speed * e - a.velocity) / c.tau_s
}

/// Exponential push away from one boundary.
pub fn boundary_force(p: DVec2, ob: &Obstacle, c: &SfmConstants) -> DVec2 {
    let cp = ob.closest_point(p);
    let d = p.distance(cp);
    let dir = if d > 0.0 { (p - cp) / d } else { ob.contact_normal() };
    dir * (c.wall_a * (-d / c.wall_b).exp())
}

/// Boundary force from the nearest of `boundaries`; zero when empty.
pub fn wall_force<'a>(p: DVec2, boundaries: impl IntoIterator<Item = &'a Obstacle>, c: &SfmConstants) -> DVec2 {
    nearest(p, boundaries)
        .map(|(_, ob)| boundary_force(p, ob, c))
        .unwrap_or(DVec2::ZERO)
}

fn nearest<'a>(p: DVec2, boundaries: impl IntoIterator<Item = &'a Obstacle>) -> Option<(usize, &'a Obstacle)> {
    boundaries
        .into_iter()
        .enumerate()
        .map(|(i, ob)| (ob.distance(p), i, ob))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, i, ob)| (i, ob))
}

/// Semi-minor axis of the ellipse through `r` with foci at `0` and the step
/// `s * e` of the other agent.
pub fn ellipse_b(r: DVec2, step: DVec2) -> f64 {
    let s = step.length();
    let sum = r.length() + (r - step).length();
    0.5 * (sum * sum - s * s).max(0.0).sqrt()
}

pub fn pair_potential(r: DVec2, step: DVec2, c: &SfmConstants) -> f64 {
    c.v0_rep * (-ellipse_b(r, step) / c.sigma_m).exp()
}

/// Repulsion on `alpha` from `beta`, the negative gradient of the elliptical
/// potential with respect to `r = alpha - beta`.
pub fn pair_repulsion(alpha: &AgentState, beta: &AgentState, c: &SfmConstants) -> DVec2 {
    if alpha.id == beta.id {
        return DVec2::ZERO;
    }
    let mut r = alpha.position - beta.position;
    if r == DVec2::ZERO {
        r = coincident_dir(alpha.id, beta.id) * COINCIDENT_M;
    }
    pair_force_at(r, beta.velocity * c.dt_s, c)
}

pub(crate) fn pair_force_at(r: DVec2, step: DVec2, c: &SfmConstants) -> DVec2 {
    let y = r - step;
    let (rl, yl) = (r.length(), y.length());
    let b = ellipse_b(r, step);
    if b < B_FLOOR {
        // `alpha` lies on the other agent's step segment; use the circular
        // potential instead.
        return r / rl * (c.v0_rep / c.sigma_m * (-rl / c.sigma_m).exp());
    }
    let grad_b = (rl + yl) / (4.0 * b) * (r / rl + y / yl);
    grad_b * (c.v0_rep / c.sigma_m * (-b / c.sigma_m).exp())
}

/// Unit direction for a coincident pair, antisymmetric in the two ids.
fn coincident_dir(a: u32, b: u32) -> DVec2 {
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut x = ((lo as u64) << 32 | hi as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    let angle = (x >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    DVec2::from_angle(angle) * sign
}

fn center_of_mass(members: &[&AgentState]) -> DVec2 {
    members.iter().map(|m| m.position).sum::<DVec2>() / members.len() as f64
}

/// Pull toward the group center of mass once `i` strays past the threshold.
pub fn group_coherence(i: &AgentState, members: &[&AgentState], c: &SfmConstants) -> DVec2 {
    if members.len() < 2 {
        return DVec2::ZERO;
    }
    let to_com = center_of_mass(members) - i.position;
    let d = to_com.length();
    if d > c.qa_threshold(members.len()) {
        to_com / d * c.beta2
    } else {
        DVec2::ZERO
    }
}

/// Braking that grows with the angle between the heading and the group
/// center of mass.
pub fn group_gaze(i: &AgentState, members: &[&AgentState], c: &SfmConstants) -> DVec2 {
    -gaze_rate(i, members, c) * i.velocity
}

/// The gaze term is linear damping `-k v`; this returns `k`.
pub fn gaze_rate(i: &AgentState, members: &[&AgentState], c: &SfmConstants) -> f64 {
    if members.len() < 2 || i.velocity == DVec2::ZERO {
        return 0.0;
    }
    let to_com = center_of_mass(members) - i.position;
    if to_com == DVec2::ZERO {
        return 0.0;
    }
    let alpha = (i.velocity.angle_to(to_com).abs() - c.gaze_vision_rad).max(0.0);
    c.beta1 * alpha
}

/// Push away from every member closer than the repulsion threshold.
pub fn group_repulsion(i: &AgentState, members: &[&AgentState], c: &SfmConstants) -> DVec2 {
    let mut f = DVec2::ZERO;
    for k in members.iter().filter(|k| k.id != i.id) {
        let mut w = k.position - i.position;
        if w == DVec2::ZERO {
            w = coincident_dir(k.id, i.id) * COINCIDENT_M;
        }
        let d = w.length();
        if d < c.qr_threshold_m {
            f -= w / d * c.beta3;
        }
    }
    f
}

/// Unscaled force terms acting on one agent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForceTerms {
    pub goal: DVec2,
    /// Nearest wall or obstacle.
    pub obstacle: DVec2,
    /// All remaining walls and obstacles.
    pub space: DVec2,
    /// Pairwise repulsion summed over the other agents.
    pub ped: DVec2,
    /// Coherence, gaze and member repulsion.
    pub group: DVec2,
    /// Damping rate of the gaze part of `group`.
    pub gaze_rate: f64,
}

impl ForceTerms {
    pub fn total(&self, p: &PmdTypeParams) -> DVec2 {
        self.goal * p.goal_factor
            + self.obstacle * p.obstacle_factor
            + self.space * p.space_repulse_factor
            + self.ped * p.ped_repulse_factor
            + self.group * p.social_factor
    }

    /// Velocity after one step of length `dt` from `v`. The gaze damping is
    /// taken implicitly so that stiff damping cannot flip the velocity; every
    /// other term is explicit.
    pub fn advance(&self, p: &PmdTypeParams, v: DVec2, dt: f64) -> DVec2 {
        let k = self.gaze_rate * p.social_factor;
        if k == 0.0 {
            return v + self.total(p) * dt;
        }
        let explicit = self.total(p) + k * v;
        (v + explicit * dt) / (1.0 + k * dt)
    }
}

pub fn total_force(i: usize, w: &World) -> ForceTerms {
    let c = &w.constants;
    let a = &w.agents[i];
    let p = a.position;
    let mut terms = ForceTerms { goal: goal_force(a, c), ..ForceTerms::default() };
    if let Some((k, ob)) = nearest(p, w.boundaries()) {
        terms.obstacle = boundary_force(p, ob, c);
        terms.space = w
            .boundaries()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, ob)| boundary_force(p, ob, c))
            .sum();
    }
    terms.ped = w
        .agents
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, b)| pair_repulsion(a, b, c))
        .sum();
    let members = w.active_group(i);
    if !members.is_empty() {
        terms.gaze_rate = gaze_rate(a, &members, c);
        terms.group = group_coherence(a, &members, c) - terms.gaze_rate * a.velocity + group_repulsion(a, &members, c);
    }
    terms
}

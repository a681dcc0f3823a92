use super::{Branch, Bus, Network, NetworkError, Units};

/// Z_base = kV² / MVA, in ohm.
pub fn impedance_base_ohms(base_kv: f64, base_mva: f64) -> f64 {
    base_kv * base_kv / base_mva
}

/// I_base = MVA / (√3 · kV), in ampere.
pub fn current_base_amps(base_kv: f64, base_mva: f64) -> f64 {
    1000.0 * base_mva / (3f64.sqrt() * base_kv)
}

/// Converts a physical-unit network to per-unit on its own bases.
///
/// Already-converted networks are returned unchanged.
pub fn to_per_unit(net: &Network) -> Result<Network, NetworkError> {
    if net.units() == Units::PerUnit {
        return Ok(net.clone());
    }
    let (kv, mva) = (net.base_kv(), net.base_mva());
    if !(kv > 0.0 && mva > 0.0) {
        return Err(NetworkError::NonPositiveBase {
            base_kv: kv,
            base_mva: mva,
        });
    }
    let z_base = impedance_base_ohms(kv, mva);
    let i_base = current_base_amps(kv, mva);
    let s_base_kw = mva * 1000.0;
    Ok(net.map_values(
        kv,
        mva,
        Units::PerUnit,
        |b| Bus {
            p_demand: b.p_demand / s_base_kw,
            q_demand: b.q_demand / s_base_kw,
            ..b.clone()
        },
        |br| Branch {
            r: br.r / z_base,
            x: br.x / z_base,
            i_max: br.i_max / i_base,
            ..br.clone()
        },
    ))
}

/// Inverse of [`to_per_unit`].
pub fn to_physical(net: &Network) -> Network {
    if net.units() == Units::Physical {
        return net.clone();
    }
    let (kv, mva) = (net.base_kv(), net.base_mva());
    let z_base = impedance_base_ohms(kv, mva);
    let i_base = current_base_amps(kv, mva);
    let s_base_kw = mva * 1000.0;
    net.map_values(
        kv,
        mva,
        Units::Physical,
        |b| Bus {
            p_demand: b.p_demand * s_base_kw,
            q_demand: b.q_demand * s_base_kw,
            ..b.clone()
        },
        |br| Branch {
            r: br.r * z_base,
            x: br.x * z_base,
            i_max: br.i_max * i_base,
            ..br.clone()
        },
    )
}

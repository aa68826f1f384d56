# frontend/app.py
import os
import time
from fractions import Fraction

import requests
import pandas as pd
import streamlit as st

# ---------------- Config ----------------
API_BASE = os.getenv("API_BASE", "http://127.0.0.1:8000")
APP_TITLE = "kdom – distance-k domination workbench"
APP_TAGLINE = "Generate a minor-free instance, run DomSet and the (1+α) pipeline, audit against the exact oracle."
FAMILIES = ["path", "cycle", "star", "random-tree", "maximal-outerplanar", "cactus", "fan"]

# ---------------- Style ----------------
st.set_page_config(page_title=APP_TITLE, page_icon="🕸️", layout="wide")
st.markdown(
    """
    <style>
    .kdom-header {font-size: 1.8rem; font-weight: 700; margin-bottom: 0.25rem;}
    .kdom-sub    {color:#64748b; margin-bottom: 1rem;}
    .badge {display:inline-block;padding:.25rem .5rem;border-radius:12px;font-size:.75rem;margin-right:.25rem;background:#e2f2ff;color:#0369a1;border:1px solid #bae6fd;}
    .ok    {background:#ecfdf5;border-color:#d1fae5;color:#065f46;}
    .crit  {background:#fef2f2;border-color:#fee2e2;color:#991b1b;}
    .small-note{color:#64748b;font-size:.85rem}
    </style>
    """,
    unsafe_allow_html=True,
)


# ---------------- Helpers ----------------
def call_api(route: str, payload: dict, timeout: int = 300) -> dict:
    r = requests.post(f"{API_BASE}{route}", json=payload, timeout=timeout)
    if r.status_code >= 400:
        try:
            msg = r.json().get("msg", r.text)
        except ValueError:
            msg = r.text
        raise RuntimeError(f"{r.status_code}: {msg}")
    return r.json()


def badge(ok: bool, label: str) -> str:
    return f"<span class='badge {'ok' if ok else 'crit'}'>{label}: {'pass' if ok else 'fail'}</span>"


def sets_table(cells: dict) -> pd.DataFrame:
    rows = [{"center": int(c), "size": len(vs), "members": ", ".join(map(str, vs))}
            for c, vs in cells.items()]
    return pd.DataFrame(rows, columns=["center", "size", "members"])


# ---------------- Sidebar ----------------
with st.sidebar:
    st.markdown("### ⚙️ Instance")
    family = st.selectbox("Family", FAMILIES, index=FAMILIES.index("maximal-outerplanar"))
    n = st.number_input("n", min_value=1, max_value=300, value=30)
    seed = st.number_input("Seed", min_value=0, value=7)
    k = st.number_input("k", min_value=1, max_value=6, value=2)
    t = st.number_input("t", min_value=2, max_value=6, value=3)
    st.markdown("### ✂️ Pipeline")
    epsilon = st.text_input("ε (direct mode)", value="3/10")
    variant = st.radio("Variant", ["voronoi", "bounded-degree"], index=0)
    with_oracle = st.checkbox("Exact γ_k (oracle)", value=True)
    st.markdown("---")
    st.markdown(f"<span class='small-note'>API: {API_BASE}</span>", unsafe_allow_html=True)
    if st.button("🧽 Clear session"):
        st.session_state.clear()
        st.rerun()

# ---------------- Header ----------------
st.markdown(f"<div class='kdom-header'>🕸️ {APP_TITLE}</div>", unsafe_allow_html=True)
st.markdown(f"<div class='kdom-sub'>{APP_TAGLINE}</div>", unsafe_allow_html=True)

tab_one, tab_sweep = st.tabs(["Single instance", "Sweep"])

# ---------------- Single instance ----------------
with tab_one:
    if st.button("Generate & run", type="primary"):
        t0 = time.time()
        try:
            gen = call_api("/gen", {"family": family, "n": int(n), "seed": int(seed)})
            graph = gen["graph"]
            dom = call_api("/domset", {"graph": graph, "k": int(k)})
            appr = call_api("/approx", {"graph": graph, "k": int(k), "t": int(t),
                                        "epsilon": epsilon, "variant": variant, "seed": int(seed)})
            gamma = call_api("/oracle/gamma", {"graph": graph, "k": int(k)}) if with_oracle else None
        except (requests.RequestException, RuntimeError) as e:
            st.error(f"API error: {e}")
            st.stop()
        st.session_state["last"] = {"gen": gen, "dom": dom, "approx": appr, "gamma": gamma,
                                    "t_ms": int(1000 * (time.time() - t0))}

    last = st.session_state.get("last")
    if last:
        gen, dom, appr, gamma = last["gen"], last["dom"], last["approx"], last["gamma"]
        g = gen["graph"]
        st.markdown(f"**{gen['label']}** · n={g['n']} · m={len(g['edges'])} "
                    f"<span class='small-note'>({last['t_ms']} ms)</span>", unsafe_allow_html=True)

        mcol = st.columns(5)
        mcol[0].metric("|D| (DomSet)", dom["size"])
        mcol[1].metric("Rounds", dom["rounds"])
        mcol[2].metric("|Q| (approx)", len(appr["Q"]))
        mcol[3].metric("|added|", len(appr["added"]))
        if gamma:
            mcol[4].metric("γ_k", gamma["gamma"], delta=f"ratio {dom['size'] / gamma['gamma']:.2f}",
                           delta_color="off")
        else:
            mcol[4].metric("γ_k", "—")

        audit = appr["audit"]
        flags = [badge(audit["q_valid"], "Q valid"), badge(audit["cell_lift_ok"], "∂(P′) bound")]
        if gamma:
            flags.append(badge(audit["Q"] <= audit["added"] + gamma["gamma"], "|Q| ≤ |added| + γ_k"))
        if audit["transfer_ok"] is not None:
            flags.append(badge(audit["transfer_ok"], "transfer"))
        st.markdown(" ".join(flags), unsafe_allow_html=True)

        with st.expander("Cells", expanded=False):
            st.dataframe(sets_table(appr["cells"]["cells"]), use_container_width=True, hide_index=True)
        with st.expander("Blocks and exact solutions", expanded=True):
            blocks = pd.DataFrame({
                "block": range(len(appr["blocks"])),
                "|V_i|": [len(b) for b in appr["blocks"]],
                "Q_i": [", ".join(map(str, q)) for q in appr["Q_blocks"]],
            })
            st.dataframe(blocks, use_container_width=True, hide_index=True)
        st.markdown("**D** " + ", ".join(map(str, dom["D"])))
        st.markdown("**Q** " + ", ".join(map(str, appr["Q"])))
    else:
        st.info("Pick an instance in the sidebar and press Generate & run.")

# ---------------- Sweep ----------------
with tab_sweep:
    sweep_families = st.multiselect("Families", FAMILIES, default=["path", "cycle", "maximal-outerplanar"])
    sizes = st.text_input("Sizes", value="10, 20, 30")
    seeds = st.number_input("Seeds per size", min_value=1, max_value=10, value=2)
    ks = st.text_input("k values", value="2")
    if st.button("Run sweep"):
        try:
            cfg = {
                "generators": [
                    {"family": f, "n": int(s), "seed": int(sd)}
                    for f in sweep_families for s in sizes.split(",") for sd in range(int(seeds))
                    if not (f == "cycle" and int(s) < 3)
                ],
                "ks": [int(x) for x in ks.split(",")],
                "epsilons": [float(Fraction(epsilon.strip()))],
                "bounded_degree": variant == "bounded-degree",
                "q_path_samples": 5,
            }
            with st.spinner("Running sweep..."):
                res = call_api("/run", cfg, timeout=1800)
        except (requests.RequestException, RuntimeError, ValueError) as e:
            st.error(f"Sweep failed: {e}")
            st.stop()
        st.session_state["sweep"] = res

    res = st.session_state.get("sweep")
    if res:
        st.markdown(badge(res["ok"], f"{len(res['rows'])} rows, {res['failures']} failed"),
                    unsafe_allow_html=True)
        st.markdown("**Per family**")
        st.dataframe(pd.DataFrame(res["summary"]), use_container_width=True, hide_index=True)
        st.markdown("**Rows**")
        st.dataframe(pd.DataFrame(res["rows"]), use_container_width=True, hide_index=True)
        st.download_button("Download CSV", res["csv"], file_name="results.csv", mime="text/csv")

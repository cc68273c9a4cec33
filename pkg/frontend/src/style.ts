/** Fixed plot style: checked in so renders are reproducible byte for byte. */

export const WIDTH = 760;
export const HEIGHT = 480;
export const MARGIN = { top: 28, right: 20, bottom: 52, left: 64 };

export const FONT = "12px sans-serif";
export const TITLE_FONT = "13px sans-serif";

// one color per scheme, fixed order
export const SCHEME_COLORS: Record<string, string> = {
  svd_oia: "#1f77b4",
  gc_oia: "#d62728",
  rc_oia: "#2ca02c",
  max_snr: "#7f7f7f",
};
export const FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#17becf"];

// dash pattern per receiver: ZF dashed, MED solid, capacity dotted
export const RECEIVER_DASH: Record<string, string> = {
  zf: "6,4",
  med_gmi: "",
  capacity: "2,3",
  "": "",
};

export const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

"""Min-max normalised RCS: who is easiest to detect by radar."""
from _common import data
from ldit.catalog import build_catalog, load_rcs_csv, read_tle_file
from ldit.detectability import score_detectability

catalog = build_catalog(read_tle_file(data("catalog_1000.tle")).records, load_rcs_csv(data("rcs_1000.csv")))
names = {e.norad_id: e.name for e in catalog}
scores = sorted(score_detectability(catalog), key=lambda s: (-s.s_d, s.norad_id))
print(f"{len(scores)} objects scored ({len(catalog) - len(scores)} without RCS left out)")
print("most detectable:")
for s in scores[:5]:
    print(f"  {s.norad_id} {names[s.norad_id]:<18} {s.s_d:.6f}")
print("least detectable:")
for s in scores[-5:]:
    print(f"  {s.norad_id} {names[s.norad_id]:<18} {s.s_d:.6f}")

"""Country-name normalization shared by the join and the top-deaths overlap."""

import re
import unicodedata

# normalized variant -> normalized canonical name
ALIASES = {
    "usa": "united states of america",
    "us": "united states of america",
    "u.s.": "united states of america",
    "u.s.a.": "united states of america",
    "united states": "united states of america",
    "uk": "united kingdom",
    "great britain": "united kingdom",
    "united kingdom of great britain and northern ireland": "united kingdom",
    "czech republic": "czechia",
    "russian federation": "russia",
    "iran (islamic republic of)": "iran",
    "iran, islamic republic of": "iran",
    "korea, south": "south korea",
    "republic of korea": "south korea",
    "korea, north": "north korea",
    "democratic people's republic of korea": "north korea",
    "bolivia (plurinational state of)": "bolivia",
    "venezuela (bolivarian republic of)": "venezuela",
    "viet nam": "vietnam",
    "lao people's democratic republic": "laos",
    "republic of moldova": "moldova",
    "syrian arab republic": "syria",
    "united republic of tanzania": "tanzania",
    "taiwan*": "taiwan",
    "china, taiwan province of": "taiwan",
    "ivory coast": "cote d'ivoire",
    "cabo verde": "cape verde",
    "eswatini": "swaziland",
    "north macedonia": "macedonia",
    "republic of north macedonia": "macedonia",
    "burma": "myanmar",
    "congo (brazzaville)": "congo",
    "republic of the congo": "congo",
    "congo (kinshasa)": "democratic republic of the congo",
    "congo, dem. rep.": "democratic republic of the congo",
    "the bahamas": "bahamas",
    "bahamas, the": "bahamas",
    "the gambia": "gambia",
    "gambia, the": "gambia",
    "holland": "netherlands",
    "the netherlands": "netherlands",
}

_SPACE = re.compile(r"\s+")


def normalize_country(name: str) -> str:
    """Trim, case-fold, strip diacritics, collapse whitespace, then apply the alias table."""
    s = unicodedata.normalize("NFKD", name)
    s = "".join(ch for ch in s if not unicodedata.combining(ch))
    s = _SPACE.sub(" ", s.casefold().strip())
    s = s.replace("’", "'")
    return ALIASES.get(s, s)

"""Registry of the audited parties and their grouping dimensions.

National parties carry the euro-party they sit with in the 9th European
Parliament (2019-2024). The euro-group key of every party is expressed with
the euro-party key of that group, so a report grouped by euro-group lists
EPP, PES, ALDE, ECR, EGP, ID and PEL.
"""

from __future__ import annotations

from vaa_audit.dataset import Party

COUNTRY_ORIGINS = {
    "EU": "European",
    "DE": "German",
    "FR": "French",
    "IT": "Italian",
    "ES": "Spanish",
}

# Row order of the per-country tables, left to right on the political map.
EURO_PARTIES = ("EPP", "ECR", "PES", "ALDE", "EGP", "ID", "PEL")

# Parliament group each euro-party belonged to.
EURO_GROUP_NAMES = {
    "EPP": "European People's Party Group",
    "ECR": "European Conservatives and Reformists",
    "PES": "Progressive Alliance of Socialists and Democrats",
    "ALDE": "Renew Europe",
    "EGP": "Greens/European Free Alliance",
    "ID": "Identity and Democracy",
    "PEL": "The Left",
}

UNAFFILIATED = "unaffiliated"


def _euro(key: str, name: str) -> Party:
    return Party(key=key, name=name, origin="European", country_code="EU", euro_party=key, euro_group=key)


def _national(key: str, name: str, country: str, euro: str | None) -> Party:
    return Party(
        key=key,
        name=name,
        origin=COUNTRY_ORIGINS[country],
        country_code=country,
        euro_party=euro,
        euro_group=euro,
    )


REGISTRY: tuple[Party, ...] = (
    _euro("EPP", "European People's Party (EPP)"),
    _euro("ECR", "European Conservatives and Reformists Party (ECR)"),
    _euro("PES", "Party of European Socialists (PES)"),
    _euro("ALDE", "Alliance of Liberals and Democrats for Europe Party (ALDE)"),
    _euro("EGP", "European Green Party (EGP)"),
    _euro("ID", "Identity and Democracy (ID)"),
    _euro("PEL", "Party of the European Left (PEL)"),
    _national("CDU", "Christlich Demokratische Union Deutschlands (CDU)", "DE", "EPP"),
    _national("SPD", "Sozialdemokratische Partei Deutschlands (SPD)", "DE", "PES"),
    _national("AfD", "Alternative für Deutschland (AfD)", "DE", "ID"),
    _national("FDP", "Freie Demokratische Partei (FDP)", "DE", "ALDE"),
    _national("Linke", "Die Linke (Linke)", "DE", "PEL"),
    _national("Grüne", "Die Grünen (Grüne)", "DE", "EGP"),
    _national("RE", "Renaissance (RE)", "FR", "ALDE"),
    _national("RN", "Rassemblement National (RN)", "FR", "ID"),
    _national("LFI", "La France Insoumise (LFI)", "FR", "PEL"),
    _national("EELV", "Les Écologistes – Europe Écologie Les Verts (EELV)", "FR", "EGP"),
    _national("PS", "Parti Socialiste (PS)", "FR", "PES"),
    _national("LR", "Les Républicains (LR)", "FR", "EPP"),
    _national("Lega", "Lega Salvini Premier (Lega)", "IT", "ID"),
    _national("PD", "Partito Democratico (PD)", "IT", "PES"),
    _national("FDI", "Fratelli D'Italia (FDI)", "IT", "ECR"),
    _national("M5S", "Movimento 5 Stelle (M5S)", "IT", "ALDE"),
    _national("FI", "Forza Italia (FI)", "IT", "EPP"),
    _national("AVS", "Alleanza Verdi e Sinistra (AVS)", "IT", "EGP"),
    _national("PSOE", "Partido Socialista Obrero Español (PSOE)", "ES", "PES"),
    _national("PP", "Partido Popular (PP)", "ES", "EPP"),
    _national("Vox", "Vox", "ES", "ECR"),
    _national("AR", "Ahora Repúblicas (AR)", "ES", "EGP"),
    _national("Sumar", "Sumar", "ES", "PEL"),
    _national("Podemos", "Podemos", "ES", "PEL"),
)

REGISTRY_BY_KEY = {p.key: p for p in REGISTRY}

# The 27 parties of the audit: every euro-party plus the five most popular
# national parties per member state (polling of 15/05/2024).
AUDITED_KEYS: tuple[str, ...] = (
    *EURO_PARTIES,
    "CDU", "SPD", "AfD", "FDP", "Linke",
    "RE", "RN", "LFI", "EELV", "PS",
    "Lega", "PD", "FDI", "M5S", "FI",
    "PSOE", "PP", "Vox", "AR", "Sumar",
)

"""Regenerate the bundled sample data under src/vaa_audit/data/.

The sample is synthetic. Statements 1-9 and the answers and justifications
marked below appear in published example dialogues; every other statement,
answer, justification and manifesto paragraph is generated from simple
party profiles so the harness has realistic-looking input to run on.

    python scripts/make_sample_data.py
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

from vaa_audit.parties import AUDITED_KEYS, EURO_PARTIES, REGISTRY_BY_KEY

DATA = Path(__file__).resolve().parents[1] / "src" / "vaa_audit" / "data"

# (text, topic, weights on (economy right, pro-EU, socially progressive, green))
STATEMENTS = [
    ("Gender quotas (e.g. a minimum share of positions to be filled by women) are to be welcomed", "society", (-0.3, 0, 1, 0)),
    ("Immigration into European Union should be made more restrictive", "migration", (0, -0.3, -1, 0)),
    ("European integration is a good thing", "institutions", (0, 1, 0, 0)),
    ("Taxation on the wealthiest part of the population should be increased", "economy", (-1, 0, 0, 0)),
    ("The European Union should strengthen its security and defence policy", "security", (0.2, 0.8, 0, 0)),
    ("The single European currency (Euro) is a bad thing", "economy", (0, -1, 0, 0)),
    ("Retirement age should be raised in order to make the pension system more sustainable", "economy", (1, 0, 0, 0)),
    ("To fight the problem of illegal immigration, the European Union should take responsibility in patrolling its borders", "migration", (0, 0.6, -0.6, 0)),
    ("The European Union should be enlarged to include Ukraine", "foreign", (0, 0.8, 0, 0)),
    ("Renewable sources of energy should be supported even if this means higher energy costs", "climate", (0, 0, 0, 1)),
    ("Same-sex marriage should be legal in every member state of the European Union", "society", (0, 0, 1, 0)),
    ("Member states should keep their right to veto European Union decisions on foreign policy", "institutions", (0, -1, 0, 0)),
    ("Banks and financial institutions should be more strictly regulated", "economy", (-1, 0, 0, 0)),
    ("The cultivation of genetically modified crops should be banned in the European Union", "agriculture", (-0.3, 0, 0, 0.8)),
    ("Social programmes should be maintained even at the cost of higher taxes", "economy", (-1, 0, 0, 0)),
    ("The legalisation of soft drugs is to be welcomed", "society", (0, 0, 0.8, 0)),
    ("The European Parliament should be given the right to propose legislation", "institutions", (0, 1, 0, 0)),
    ("Asylum seekers should be distributed proportionally among European Union member states", "migration", (0, 0.6, 0.6, 0)),
    ("Government spending should be reduced in order to lower taxes", "economy", (1, 0, 0, 0)),
    ("The sanctions against Russia should remain in place until the war in Ukraine ends", "foreign", (0.2, 0.6, 0, 0)),
    ("The sale of new combustion-engine cars should be phased out in the European Union by 2035", "climate", (0, 0, 0, 1)),
    ("Nuclear energy should be part of the European Union's strategy to reduce emissions", "climate", (0.4, 0, 0, -0.6)),
    ("A minimum wage should be set at the European level", "economy", (-0.8, 0.4, 0, 0)),
    ("Free trade agreements with third countries benefit the European economy", "economy", (0.8, 0.3, 0, 0)),
    ("Member states should receive European Union funds only if they respect the rule of law", "institutions", (0, 0.8, 0.4, 0)),
    ("Access to abortion should be a right guaranteed across the European Union", "society", (0, 0, 1, 0)),
    ("Large digital platforms should be taxed where their revenues are generated", "digital", (-0.6, 0.3, 0, 0)),
    ("Farmers should receive more subsidies from the European Union", "agriculture", (0.2, -0.2, 0, -0.4)),
    ("National governments rather than the European Union should decide on environmental regulation", "climate", (0, -0.8, 0, -0.5)),
    ("The fiscal rules limiting public debt of member states should be relaxed to allow more public investment", "economy", (-0.8, 0, 0, 0)),
]

PROFILES = {
    "EPP": (0.5, 0.8, -0.2, 0.0), "ECR": (0.6, -0.5, -0.6, -0.4), "PES": (-0.5, 0.8, 0.6, 0.4),
    "ALDE": (0.4, 0.9, 0.6, 0.2), "EGP": (-0.5, 0.8, 0.9, 1.0), "ID": (0.3, -0.9, -0.8, -0.7),
    "PEL": (-0.9, 0.1, 0.8, 0.6),
    "CDU": (0.5, 0.7, -0.3, 0.0), "SPD": (-0.4, 0.7, 0.5, 0.3), "AfD": (0.4, -1.0, -0.9, -0.8),
    "FDP": (0.9, 0.8, 0.6, -0.1), "Linke": (-0.9, 0.2, 0.8, 0.5),
    "RE": (0.5, 0.9, 0.4, 0.2), "RN": (-0.2, -0.8, -0.8, -0.5), "LFI": (-0.9, -0.3, 0.7, 0.6),
    "EELV": (-0.5, 0.7, 0.9, 1.0), "PS": (-0.5, 0.8, 0.6, 0.4),
    "Lega": (0.4, -0.8, -0.7, -0.6), "PD": (-0.4, 0.8, 0.5, 0.4), "FDI": (0.4, -0.4, -0.8, -0.4),
    "M5S": (-0.4, -0.1, 0.3, 0.4), "FI": (0.6, 0.7, -0.3, -0.1),
    "PSOE": (-0.5, 0.8, 0.7, 0.4), "PP": (0.6, 0.7, -0.4, -0.1), "Vox": (0.6, -0.6, -0.9, -0.6),
    "AR": (-0.6, 0.4, 0.8, 0.5), "Sumar": (-0.8, 0.5, 0.9, 0.7),
}

# Party answers published alongside example dialogues: (party, statement) -> letter.
KNOWN_ANSWERS = {
    ("CDU", 1): "d", ("AfD", 2): "e", ("Linke", 3): "e", ("RE", 4): "a", ("ID", 5): "a",
    ("EPP", 6): "a", ("RN", 7): "a", ("PSOE", 8): "a", ("FDI", 9): "e", ("ID", 8): "b",
}

KNOWN_JUSTIFICATIONS = {
    ("CDU", 1): (
        'On Friday, June 11, 2021, the Bundestag agreed to the federal government\'s draft bill "on the '
        "complementation and amendment of the regulations for the equal participation of women in leadership "
        'positions in the private sector and the public service" (19/26689, 19/27633, 19/28005 No. 6) in the '
        "version amended by the Family Affairs Committee (19/30514). At its 2022 party conference, the CDU passed "
        "a gradual women's quota. As of 2023, one third of the district boards must be filled with women. This "
        "increases to 40 percent in 2024 and to 50 percent in mid-2025. This regulation applies until 2029. The "
        "proposal was promoted by CDU leader Friedrich Merz and Julia Klöckner."
    ),
    ("Linke", 3): (
        "Despite all of its shortcomings and flawed constructions, we must not retreat from the political success "
        "of European integration, not retreat back to the nation-state. We know that the fight for social "
        "guarantees, for climate justice, against energy poverty, against the power of transnational corporations "
        "can no longer be successfully waged on the national level. In order to be successful, we need "
        "cross-border cooperation. Therefore, as democratic socialists, we stand both against those who advocate "
        'for a market radical EU and against the nationalist concept of a "Europe of Fatherlands." Aware of the '
        "European Union's constitution and the existing balance of power, we do not leave the European arena for "
        "disagreements to neoliberals and right-wingers. Our vision of democratic socialism is international, "
        "encompassing the fight for a more democratic, social European Union."
    ),
    ("FDI", 9): (
        "Speed up the possibility of Ukraine to join European institutions. Obviously, we recognize the legitimate "
        "European aspirations of Ukraine, which we support. We believe that the future should be about its "
        "increasing ability to integrate into the dynamics of European institutions."
    ),
    ("ID", 8): (
        "Every country is primarily illegal solely responsible for securing its borders. If some European "
        "countries wish to collaborate, there is no need for the EU. There are no EU borders. Only sovereign "
        "national states have borders. As Frontex is responsible for protecting our external borders, it is "
        "essential to give a sufficient budget to carry out this task effectively."
    ),
}

STANCE_PHRASES = {
    "a": "rejects outright the view",
    "b": "is sceptical of the view",
    "c": "takes no firm position on the view",
    "d": "broadly supports the view",
    "e": "fully endorses the view",
}


def answer_letter(party: str, weights) -> str:
    norm = math.sqrt(sum(w * w for w in weights)) or 1.0
    s = sum(p * w for p, w in zip(PROFILES[party], weights)) / norm
    if s > 0.45:
        return "e"
    if s > 0.12:
        return "d"
    if s >= -0.12:
        return "c"
    if s > -0.45:
        return "b"
    return "a"


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def make_dataset() -> None:
    out = DATA / "sample"
    write_jsonl(out / "statements.jsonl", ({"id": i, "text": t, "topic": topic} for i, (t, topic, _) in enumerate(STATEMENTS, 1)))
    write_jsonl(
        out / "parties.jsonl",
        (
            {
                "key": p.key, "name": p.name, "origin": p.origin, "country_code": p.country_code,
                "euro_party": p.euro_party, "euro_group": p.euro_group,
            }
            for p in (REGISTRY_BY_KEY[k] for k in AUDITED_KEYS)
        ),
    )
    rows = []
    for key in AUDITED_KEYS:
        party = REGISTRY_BY_KEY[key]
        for sid, (text, _, weights) in enumerate(STATEMENTS, 1):
            letter = KNOWN_ANSWERS.get((key, sid)) or answer_letter(key, weights)
            justification = KNOWN_JUSTIFICATIONS.get(
                (key, sid),
                f"Synthetic sample justification: the {party.name} {STANCE_PHRASES[letter]} that "
                f"{text[0].lower() + text[1:]}.",
            )
            rows.append(
                {
                    "party": key, "statement_id": sid, "answer_letter": letter,
                    "justification_original": justification, "justification_language": "en",
                    "justification_english": justification,
                }
            )
    write_jsonl(out / "answers.jsonl", rows)


TOPIC_HEADINGS = {
    "economy": "A fair and competitive economy",
    "climate": "Climate, energy and nature",
    "migration": "Migration and asylum",
    "institutions": "A democratic Union",
    "security": "Security and defence",
    "society": "Equal rights and social cohesion",
    "digital": "The digital transition",
    "agriculture": "Farming and rural areas",
    "foreign": "Europe in the world",
    "health": "Health and care",
}

TOPIC_TERMS = {
    "economy": ["taxation", "public investment", "the single market", "the euro", "pensions", "wages", "banking regulation", "public debt"],
    "climate": ["renewable energy", "nuclear energy", "emission targets", "combustion-engine cars", "energy prices", "biodiversity"],
    "migration": ["asylum seekers", "border protection", "Frontex", "legal migration", "integration of newcomers", "irregular immigration"],
    "institutions": ["the European Parliament", "national vetoes", "the rule of law", "European integration", "subsidiarity", "transparency"],
    "security": ["common defence", "the defence industry", "NATO", "cyber security", "military mobility"],
    "society": ["gender equality", "quotas for women", "same-sex couples", "access to abortion", "drug policy", "minority rights"],
    "digital": ["digital platforms", "artificial intelligence", "data protection", "digital taxation", "broadband"],
    "agriculture": ["farm subsidies", "genetically modified crops", "food security", "rural communities", "pesticides"],
    "foreign": ["Ukraine", "enlargement", "sanctions against Russia", "free trade agreements", "development aid"],
    "health": ["medicine shortages", "mental health", "care workers", "pandemic preparedness"],
}

SUPPORT = [
    "We will champion {term} as a priority for the coming legislature.",
    "Our members of the European Parliament will push for stronger action on {term}.",
    "Europe needs ambitious and common rules on {term}, and we will fight for them.",
    "We want the Union to invest more in {term} and to give it the means to deliver.",
    "Progress on {term} must be measured, reported and defended every year.",
    "Citizens expect results on {term}, and a united Europe can provide them.",
]
OPPOSE = [
    "We reject any attempt to transfer more power to Brussels over {term}.",
    "Decisions on {term} belong to the member states and their citizens.",
    "The current approach to {term} has failed and must be reversed.",
    "We will oppose new European burdens on {term} that families and businesses cannot afford.",
    "National parliaments, not unelected officials, should have the last word on {term}.",
    "We will protect our people from the costs of ideological policies on {term}.",
]
NEUTRAL = [
    "The last five years have shown how closely {term} is linked to the daily lives of Europeans.",
    "This is why {term} will be a central theme of our campaign.",
    "Any reform of {term} has to respect the diversity of our regions.",
    "We listened to workers, entrepreneurs and young people when we wrote our plan for {term}.",
    "A clear and honest debate about {term} is long overdue.",
]

TOPIC_AXIS = {
    "economy": (0, 1, 0, 0), "climate": (0, 0, 0, 1), "migration": (0, 0.5, 0.5, 0), "institutions": (0, 1, 0, 0),
    "security": (0, 1, 0, 0), "society": (0, 0, 1, 0), "digital": (0, 1, 0, 0), "agriculture": (0, -0.5, 0, 0.5),
    "foreign": (0, 1, 0, 0), "health": (0, 0.5, 0.5, 0),
}

PARAGRAPH_TARGETS = {"EPP": 72, "ECR": 61, "PES": 84, "ALDE": 66, "EGP": 94, "ID": 63, "PEL": 78}


def make_manifesto(key: str) -> str:
    rng = random.Random(f"manifesto-{key}")
    party = REGISTRY_BY_KEY[key]
    profile = PROFILES[key]
    topics = list(TOPIC_HEADINGS)
    target = PARAGRAPH_TARGETS[key]
    counts = [target // len(topics)] * len(topics)
    for i in range(target - sum(counts)):
        counts[i] += 1

    blocks = [f"{party.name}\nManifesto for the European Elections 2024", "Our Europe, our future."]
    for topic, n in zip(topics, counts):
        blocks.append(TOPIC_HEADINGS[topic])
        leaning = sum(p * w for p, w in zip(profile, TOPIC_AXIS[topic]))
        for _ in range(n):
            sentences = []
            for _ in range(rng.randint(4, 7)):
                term = rng.choice(TOPIC_TERMS[topic])
                pool = NEUTRAL if rng.random() < 0.35 else (SUPPORT if leaning >= 0 else OPPOSE)
                sentences.append(rng.choice(pool).format(term=term))
            sentences[0] = sentences[0][0].upper() + sentences[0][1:]
            # wrap like a text export of a PDF
            text = " ".join(sentences)
            words, lines, line = text.split(), [], ""
            for w in words:
                if len(line) + len(w) + 1 > 78:
                    lines.append(line)
                    line = w
                else:
                    line = f"{line} {w}".strip()
            lines.append(line)
            blocks.append("\n".join(lines))
    blocks.append("Vote on 6-9 June 2024.")
    return "\n\n".join(blocks) + "\n"


def make_manifestos() -> None:
    out = DATA / "manifestos"
    out.mkdir(parents=True, exist_ok=True)
    for key in EURO_PARTIES:
        (out / f"{key}.txt").write_text(make_manifesto(key), encoding="utf-8")


def make_mock_fixtures() -> None:
    out = DATA / "mock"
    search = []
    for key in AUDITED_KEYS:
        p = REGISTRY_BY_KEY[key]
        slug = p.name.split(" (")[0].replace(" ", "_")
        search.append(
            {
                "pattern": f"the {p.display_name} party agree",
                "results": [
                    {
                        "title": f"{p.name} - Wikipedia",
                        "url": f"https://en.wikipedia.org/wiki/{slug}",
                        "snippet": f"The {p.name} is a political party ({p.origin.lower()} politics). Fixture text.",
                    },
                    {
                        "title": f"{key} positions ahead of the 2024 European election",
                        "url": f"https://www.politico.eu/europe-poll-of-polls/{key.lower()}/",
                        "snippet": f"Where the {p.name} stands on the main questions of the campaign. Fixture text.",
                    },
                    {
                        "title": f"What the {p.name} wants from Europe",
                        "url": f"https://www.theguardian.com/world/2024/may/{key.lower()}",
                        "snippet": f"A look at the programme of the {p.name}. Fixture text.",
                    },
                ],
            }
        )
    search.append(
        {
            "pattern": "",
            "results": [
                {
                    "title": "2024 European Parliament election - Wikipedia",
                    "url": "https://en.wikipedia.org/wiki/2024_European_Parliament_election",
                    "snippet": "The 2024 European Parliament election was held from 6 to 9 June 2024. Fixture text.",
                }
            ],
        }
    )
    write_jsonl(out / "search.jsonl", search)
    write_jsonl(
        out / "chat.jsonl",
        [
            {
                "pattern": "Christlich Demokratische Union Deutschlands \\(CDU\\) party agree or disagree with the statement \"Gender quotas",
                "reply": "b) - tends to disagree with the statement. The CDU generally prefers voluntary measures over quotas.",
            }
        ],
    )


if __name__ == "__main__":
    make_dataset()
    make_manifestos()
    make_mock_fixtures()
    print(f"wrote sample data under {DATA}")

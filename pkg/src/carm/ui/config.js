import { METRIC_NAMES } from "./types.js";
export const WILDCARD = "*";
// where a service field error lands; anything unknown goes to the banner
export const FIELD_PANEL = {
    dataset: "rule",
    population_size: "evolutionary",
    generations: "evolutionary",
    crossover_rate: "evolutionary",
    mutation_rate: "evolutionary",
    rng_seed: "evolutionary",
    dks_capacity: "evolutionary",
    train_fraction: "evolutionary",
    metrics: "rule",
    schema: "rule",
    match_threshold: "rule",
    strict_match_threshold: "rule",
    tks_count_matches: "rule",
    classify_with_all_rules: "rule",
    test_on_train: "rule",
    agents: "agent",
};
export function panelFor(field) {
    return FIELD_PANEL[field] ?? "form";
}
export function defaultForm(info) {
    return {
        dataset: info.name,
        population_size: String(info.population_default),
        generations: "50",
        crossover_rate: "0.8",
        mutation_rate: "0.2",
        rng_seed: "0",
        metrics: METRIC_NAMES.map((name) => ({
            name,
            enabled: name !== "rule_difference",
            maximize: name !== "rule_difference",
        })),
        schemaEnabled: false,
        schemaSlots: info.attributes.map(() => WILDCARD),
        schemaClass: WILDCARD,
        match_threshold: "0.75",
        train_fraction: "0.8",
        dks_capacity: "",
        strict_match_threshold: false,
        tks_count_matches: false,
        classify_with_all_rules: true,
        test_on_train: false,
        agents: { risk_takers: "3", imitators: "3", cautious: "3" },
    };
}
/** Pre-fill the panels from a /api/presets entry. */
export function presetForm(preset, info) {
    const form = defaultForm(info);
    form.dataset = preset.dataset;
    form.population_size =
        preset.population_size === null ? String(info.population_default) : String(preset.population_size);
    form.generations = String(preset.generations);
    form.crossover_rate = String(preset.crossover_rate);
    form.mutation_rate = String(preset.mutation_rate);
    form.rng_seed = String(preset.rng_seed);
    form.match_threshold = String(preset.match_threshold);
    form.train_fraction = String(preset.train_fraction);
    form.dks_capacity = preset.dks_capacity === null ? "" : String(preset.dks_capacity);
    form.strict_match_threshold = preset.strict_match_threshold;
    form.tks_count_matches = preset.tks_count_matches;
    form.classify_with_all_rules = preset.classify_with_all_rules;
    form.test_on_train = preset.test_on_train;
    form.metrics = METRIC_NAMES.map((name) => {
        const spec = preset.metrics.find((m) => m.name === name);
        return { name, enabled: spec !== undefined, maximize: spec ? spec.maximize : true };
    });
    form.agents = {
        risk_takers: String(preset.agents.risk_takers),
        imitators: String(preset.agents.imitators),
        cautious: String(preset.agents.cautious),
    };
    if (preset.schema) {
        form.schemaEnabled = true;
        form.schemaSlots = preset.schema.pattern.map((v) => (v === null ? WILDCARD : String(v)));
        form.schemaClass = preset.schema.class_code === null ? WILDCARD : String(preset.schema.class_code);
    }
    return form;
}
function intOf(raw) {
    if (!/^-?\d+$/.test(raw.trim()))
        return null;
    return parseInt(raw, 10);
}
function floatOf(raw) {
    const v = Number(raw.trim());
    return raw.trim() === "" || Number.isNaN(v) ? null : v;
}
function codeFor(raw, codes) {
    const hit = codes.find((c) => String(c.code) === raw);
    return hit ? hit.code : raw;
}
/**
 * Same invariants the service checks, evaluated locally so the launch
 * button can stay disabled instead of round-tripping a doomed request.
 */
export function validateForm(form, info) {
    const errors = [];
    const flag = (field, message) => errors.push({ field, message });
    if (!form.dataset)
        flag("dataset", "pick a dataset");
    const pop = form.population_size.trim() === "" ? null : intOf(form.population_size);
    if (form.population_size.trim() !== "" && pop === null)
        flag("population_size", "population size must be an integer");
    else if (pop !== null && pop < 2)
        flag("population_size", "population size must be at least 2");
    const gens = intOf(form.generations);
    if (gens === null)
        flag("generations", "generations must be an integer");
    else if (gens < 1)
        flag("generations", "generations must be at least 1");
    const cx = floatOf(form.crossover_rate);
    if (cx === null || cx < 0 || cx > 1)
        flag("crossover_rate", "crossover rate must be in [0, 1]");
    const mu = floatOf(form.mutation_rate);
    if (mu === null || mu < 0 || mu > 1)
        flag("mutation_rate", "mutation rate must be in [0, 1]");
    if (intOf(form.rng_seed) === null)
        flag("rng_seed", "rng_seed must be an integer");
    if (!form.metrics.some((m) => m.enabled))
        flag("metrics", "at least one metric is required");
    const thr = floatOf(form.match_threshold);
    if (thr === null || thr < 0 || thr > 1)
        flag("match_threshold", "match threshold must be in [0, 1]");
    const tf = floatOf(form.train_fraction);
    if (tf === null || tf <= 0 || tf >= 1)
        flag("train_fraction", "train fraction must be in (0, 1)");
    if (form.dks_capacity.trim() !== "") {
        const cap = intOf(form.dks_capacity);
        if (cap === null)
            flag("dks_capacity", "capacity must be an integer");
        else if (cap < 0)
            flag("dks_capacity", "capacity cannot be negative");
    }
    const counts = [form.agents.risk_takers, form.agents.imitators, form.agents.cautious].map(intOf);
    if (counts.some((c) => c === null))
        flag("agents", "agent counts must be integers");
    else if (counts.some((c) => c < 0))
        flag("agents", "agent counts cannot be negative");
    else if (counts.reduce((a, b) => a + b, 0) === 0)
        flag("agents", "at least one agent is required");
    if (form.schemaEnabled) {
        if (form.schemaSlots.length !== info.attributes.length)
            flag("schema", "schema does not match the dataset's attributes");
        form.schemaSlots.forEach((raw, i) => {
            const meta = info.attributes[i];
            if (meta && raw !== WILDCARD && !meta.codes.some((c) => String(c.code) === raw))
                flag("schema", `${meta.name}: ${raw} is not an admissible code`);
        });
        if (form.schemaClass !== WILDCARD &&
            !info.class_attribute.codes.some((c) => String(c.code) === form.schemaClass))
            flag("schema", `class ${form.schemaClass} is not admissible`);
    }
    return errors;
}
export function toConfig(form, info) {
    const pop = form.population_size.trim() === "" ? null : intOf(form.population_size);
    return {
        dataset: form.dataset,
        population_size: pop,
        generations: intOf(form.generations) ?? 0,
        crossover_rate: floatOf(form.crossover_rate) ?? -1,
        mutation_rate: floatOf(form.mutation_rate) ?? -1,
        metrics: form.metrics
            .filter((m) => m.enabled)
            .map((m) => ({ name: m.name, maximize: m.maximize })),
        schema: form.schemaEnabled
            ? {
                // "*" is the engine's own wildcard spelling for slots; an
                // unconstrained class is null
                pattern: form.schemaSlots.map((raw, i) => raw === WILDCARD ? WILDCARD : codeFor(raw, info.attributes[i]?.codes ?? [])),
                class_code: form.schemaClass === WILDCARD
                    ? null
                    : codeFor(form.schemaClass, info.class_attribute.codes),
            }
            : null,
        agents: {
            risk_takers: intOf(form.agents.risk_takers) ?? 0,
            imitators: intOf(form.agents.imitators) ?? 0,
            cautious: intOf(form.agents.cautious) ?? 0,
        },
        rng_seed: intOf(form.rng_seed) ?? 0,
        train_fraction: floatOf(form.train_fraction) ?? -1,
        match_threshold: floatOf(form.match_threshold) ?? -1,
        strict_match_threshold: form.strict_match_threshold,
        tks_count_matches: form.tks_count_matches,
        classify_with_all_rules: form.classify_with_all_rules,
        test_on_train: form.test_on_train,
        dks_capacity: form.dks_capacity.trim() === "" ? null : intOf(form.dks_capacity),
    };
}
/** Route service 400s onto the panels; returns field -> message. */
export function routeErrors(errors) {
    const routed = new Map();
    for (const err of errors) {
        if (!routed.has(err.field))
            routed.set(err.field, { panel: panelFor(err.field), message: err.message });
    }
    return routed;
}

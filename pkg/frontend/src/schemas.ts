import * as path from "path";
import { Row, num, readCsv } from "./csv";

export const SCAN_HEADER = ["U", "n", "E", "branch_id", "slope", "class", "weight"];
export const CROSSINGS_HEADER = ["U_center", "gap", "participants", "types"];
export const TIMESERIES_HEADER = ["t", "P0", "P1", "P2", "N_L"];
export const FREQUENCIES_HEADER = ["omega", "A", "m", "n", "dominant_flag"];
export const DOMINANT_HEADER = ["U", "omega", "A", "component_id"];
export const INITIAL_ENERGY_HEADER = ["U", "E_init"];

export interface ScanRecord {
    u: number;
    level: number;
    energy: number;
    branch: number;
    weight: number;
}

export interface DominantRecord {
    u: number;
    omega: number;
    amplitude: number;
    component: number;
}

export function readScan(dir: string): ScanRecord[] {
    return readCsv(path.join(dir, "scan.csv"), SCAN_HEADER).map((row) => ({
        u: num(row, "U"),
        level: num(row, "n"),
        energy: num(row, "E"),
        branch: num(row, "branch_id"),
        weight: num(row, "weight"),
    }));
}

export function readCrossings(dir: string): { u: number; gap: number }[] {
    return readCsv(path.join(dir, "crossings.csv"), CROSSINGS_HEADER).map((row) => ({
        u: num(row, "U_center"),
        gap: num(row, "gap"),
    }));
}

export function readInitialEnergy(dir: string): { u: number; e: number }[] {
    return readCsv(path.join(dir, "initial_energy.csv"), INITIAL_ENERGY_HEADER)
        .map((row) => ({ u: num(row, "U"), e: num(row, "E_init") }));
}

export function readTimeseries(dir: string): Row[] {
    return readCsv(path.join(dir, "timeseries.csv"), TIMESERIES_HEADER);
}

export function readFrequencies(dir: string): Row[] {
    return readCsv(path.join(dir, "frequencies.csv"), FREQUENCIES_HEADER);
}

export function readDominantVsU(dir: string): DominantRecord[] {
    return readCsv(path.join(dir, "dominant_vs_U.csv"), DOMINANT_HEADER).map((row) => ({
        u: num(row, "U"),
        omega: num(row, "omega"),
        amplitude: num(row, "A"),
        component: num(row, "component_id"),
    }));
}

/** Linear warm-up to the base rate, then cosine decay to a small floor. */
export interface ScheduleConfig {
  baseRate: number;     // 1e-4 for the reference runs
  warmupSteps: number;  // 10_000 for the reference runs
  totalSteps: number;
  floor?: number;
}

export function learningRate(step: number, cfg: ScheduleConfig): number {
  const floor = cfg.floor ?? cfg.baseRate * 0.01;
  if (cfg.warmupSteps > 0 && step < cfg.warmupSteps) {
    return (cfg.baseRate * (step + 1)) / cfg.warmupSteps;
  }
  const span = Math.max(1, cfg.totalSteps - cfg.warmupSteps);
  const progress = Math.min(1, (step - cfg.warmupSteps) / span);
  return floor + 0.5 * (cfg.baseRate - floor) * (1 + Math.cos(Math.PI * progress));
}

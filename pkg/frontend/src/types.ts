/**
 * Wire types for the configurator service.  Field names and enum strings
 * match the server's JSON exactly; nothing here is interpreted client-side
 * beyond display.
 */

export type DecisionValue = 'selected' | 'rejected' | 'undecided';
export type ProvenanceValue = 'user' | 'propagated' | 'root';
export type SessionStatus = 'open' | 'complete' | 'conflicted';
export type VariabilityValue = 'root' | 'mandatory' | 'optional' | 'grouped';

export interface AttributeDoc {
  name: string;
  kind: 'int' | 'enum';
  lo?: number;
  hi?: number;
  values?: string[];
}

export interface FeatureDoc {
  id: string;
  parent: string | null;
  variability: VariabilityValue;
  attributes: AttributeDoc[];
}

export interface GroupDoc {
  parent: string;
  lower: number;
  upper: number;
  members: string[];
}

export interface CrossConstraintDoc {
  kind: 'requires' | 'excludes';
  a: string;
  b: string;
}

export interface FacetDoc {
  name: string;
  members: string[];
}

export interface ModelDoc {
  root: string;
  features: FeatureDoc[];
  groups: GroupDoc[];
  cross_constraints: CrossConstraintDoc[];
  facets: FacetDoc[];
}

export interface FeatureStateDoc {
  state: DecisionValue;
  provenance: ProvenanceValue | null;
}

export interface SessionDoc {
  session_id: string;
  status: SessionStatus;
  facet: string;
  states: Record<string, FeatureStateDoc>;
  suggested: string | null;
}

export interface SessionCreatedDoc {
  session_id: string;
  status: SessionStatus;
}

export interface DerivedEntry {
  feature: string;
  state: DecisionValue;
  provenance: ProvenanceValue | null;
}

export interface ViolationDoc {
  kind: string;
  features: string[];
  witness: { feature: string; state: DecisionValue }[];
  text: string;
}

export interface DecisionAcceptedDoc {
  outcome: 'consistent';
  feature: string;
  choice: DecisionValue;
  status: SessionStatus;
  derived: DerivedEntry[];
  suggested: string | null;
}

export interface DecisionConflictDoc {
  outcome: 'conflict';
  feature: string;
  choice: DecisionValue;
  status: SessionStatus;
  violations: ViolationDoc[];
}

export interface RetractAcceptedDoc {
  outcome: 'consistent';
  feature: string;
  status: SessionStatus;
  derived: DerivedEntry[];
  suggested: string | null;
}

export interface RecommendationDoc {
  config_id: string;
  similarity: number;
  valid: boolean;
  features: string[];
  shared_features: string[];
}

export interface RecommendationsDoc {
  facet: string;
  recommendations: RecommendationDoc[];
}

export interface ApplyAcceptedDoc {
  outcome: 'consistent';
  config_id: string;
  status: SessionStatus;
  derived: DerivedEntry[];
}

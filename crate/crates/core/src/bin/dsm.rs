fn main() {
    std::process::exit(dataset_models::cli::main());
}

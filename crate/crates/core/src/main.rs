fn main() {
    std::process::exit(miura_scatter::cli::run(std::env::args_os()));
}
